#include "odoforge/coset.hpp"

#include "odoforge/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace odoforge {

// ---------------------------------------------------------------- caps

Caps caps_from_string(std::string_view text, Caps base) {
  std::string s(text);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::SemanticError, "caps entry '" + item + "' lacks '='");
    auto trim = [](std::string x) {
      x.erase(0, x.find_first_not_of(" \t"));
      x.erase(x.find_last_not_of(" \t") + 1);
      return x;
    };
    const std::string key = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (value.empty() || *end != '\0' || v <= 0)
      throw Error(ErrorKind::SemanticError, "caps value for '" + key + "' must be a positive integer");
    if (key == "max_states")
      base.max_states = static_cast<std::size_t>(v);
    else if (key == "core_cap")
      base.core_cap = static_cast<std::size_t>(v);
    else if (key == "free_radius")
      base.ball.free_radius = static_cast<int>(v);
    else if (key == "abelian_radius")
      base.ball.abelian_radius = static_cast<int>(v);
    else
      throw Error(ErrorKind::SemanticError, "unknown caps key '" + key + "'");
  }
  return base;
}

const Caps& default_caps() {
  static const Caps caps = [] {
    const char* env = std::getenv("ODOFORGE_CAPS");
    return env ? caps_from_string(env) : Caps{};
  }();
  return caps;
}

// ---------------------------------------------------------------- CosetTable

CosetTable::CosetTable(GroupPtr group, std::vector<std::vector<int>> perms)
    : group_(std::move(group)), perms_(std::move(perms)) {
  if (static_cast<int>(perms_.size()) != group_->rank())
    throw Error(ErrorKind::InvariantViolation, "coset table needs one permutation per generator");
  size_ = perms_.empty() ? 0 : static_cast<int>(perms_.front().size());
  if (size_ < 1) throw Error(ErrorKind::InvariantViolation, "coset table is empty");
  inverse_.assign(perms_.size(), std::vector<int>(size_, -1));
  for (std::size_t g = 0; g < perms_.size(); ++g) {
    if (static_cast<int>(perms_[g].size()) != size_)
      throw Error(ErrorKind::InvariantViolation, "ragged coset table");
    for (int s = 0; s < size_; ++s) {
      const int t = perms_[g][s];
      if (t < 0 || t >= size_ || inverse_[g][t] != -1)
        throw Error(ErrorKind::InvariantViolation, "generator map is not a bijection");
      inverse_[g][t] = s;
    }
  }
  std::vector<char> seen(size_, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    for (std::size_t g = 0; g < perms_.size(); ++g)
      for (int t : {perms_[g][s], inverse_[g][s]})
        if (!seen[t]) {
          seen[t] = 1;
          ++reached;
          queue.push_back(t);
        }
  }
  if (reached != size_) throw Error(ErrorKind::InvariantViolation, "coset table is not transitive");
}

int CosetTable::act(const Word& w, int state) const {
  require_same_group(group_, w.group());
  const auto& d = w.data();
  if (group_->kind() == GroupKind::FreeAbelian) {
    for (std::size_t g = 0; g < d.size(); ++g) {
      const auto& p = d[g] < 0 ? inverse_[g] : perms_[g];
      for (std::int64_t k = 0; k < std::llabs(d[g]); ++k) state = p[state];
    }
    return state;
  }
  for (auto it = d.rbegin(); it != d.rend(); ++it) state = apply(*it, state);
  return state;
}

// ---------------------------------------------------------------- canonical numbering

namespace {

// Shortlex-least word reaching each state from `base`. Unreachable states get
// no word.
std::vector<std::optional<Word>> shortlex_transversal(const GroupPtr& group,
                                                      const std::vector<std::vector<int>>& perms,
                                                      const std::vector<std::vector<int>>& inverse,
                                                      int base) {
  const int n = static_cast<int>(perms.front().size());
  const int nsym = 2 * group->rank();
  auto apply = [&](int sym, int s) {
    return sym % 2 == 0 ? perms[sym / 2][s] : inverse[sym / 2][s];
  };

  std::vector<int> dist(n, -1);
  dist[base] = 0;
  std::vector<int> layer{base};
  int max_dist = 0;
  std::vector<std::optional<Word>> words(n);

  if (group->kind() == GroupKind::Free) {
    std::vector<std::vector<Letter>> letters(n);
    while (!layer.empty()) {
      std::vector<int> next;
      for (int s : layer)
        for (int sym = 0; sym < nsym; ++sym) {
          const int t = apply(sym, s);
          if (dist[t] == -1) {
            dist[t] = dist[s] + 1;
            next.push_back(t);
          }
        }
      // t_j = s . t_{s^-1 j} for the least symbol s with s^-1 j one layer down.
      for (int j : next)
        for (int sym = 0; sym < nsym; ++sym) {
          const int i = apply(sym ^ 1, j);
          if (dist[i] == dist[j] - 1) {
            letters[j].push_back(letter_of_symbol(sym));
            letters[j].insert(letters[j].end(), letters[i].begin(), letters[i].end());
            break;
          }
        }
      layer = std::move(next);
    }
    for (int s = 0; s < n; ++s)
      if (dist[s] >= 0) words[s] = Word::from_letters(group, letters[s]);
    return words;
  }

  // Free-abelian: word length is the L1 norm, so BFS distance bounds the
  // search radius; scan that ball in shortlex order.
  while (!layer.empty()) {
    std::vector<int> next;
    for (int s : layer)
      for (int sym = 0; sym < nsym; ++sym) {
        const int t = apply(sym, s);
        if (dist[t] == -1) {
          dist[t] = dist[s] + 1;
          max_dist = std::max(max_dist, dist[t]);
          next.push_back(t);
        }
      }
    layer = std::move(next);
  }
  BallCaps unbounded;
  unbounded.abelian_radius = max_dist;
  int remaining = static_cast<int>(std::count_if(dist.begin(), dist.end(), [](int d) { return d >= 0; }));
  for (int r = 0; r <= max_dist && remaining > 0; ++r) {
    for (auto& w : sphere_enumerate(group, r, unbounded)) {
      // act relative to base: the table's own state 0 may differ from base
      int s = base;
      const auto& d = w.data();
      for (std::size_t g = 0; g < d.size(); ++g)
        for (std::int64_t k = 0; k < std::llabs(d[g]); ++k)
          s = d[g] < 0 ? inverse[g][s] : perms[g][s];
      if (!words[s]) {
        words[s] = std::move(w);
        --remaining;
      }
    }
  }
  return words;
}

std::vector<std::vector<int>> invert_perms(const std::vector<std::vector<int>>& perms) {
  std::vector<std::vector<int>> inv(perms.size(), std::vector<int>(perms.front().size(), -1));
  for (std::size_t g = 0; g < perms.size(); ++g)
    for (std::size_t s = 0; s < perms[g].size(); ++s) {
      const int t = perms[g][s];
      if (t < 0 || static_cast<std::size_t>(t) >= perms[g].size() || inv[g][t] != -1)
        throw Error(ErrorKind::InvariantViolation, "generator map is not a bijection");
      inv[g][t] = static_cast<int>(s);
    }
  return inv;
}

}  // namespace

SubgroupHandle SubgroupHandle::from_action(GroupPtr group, const std::vector<std::vector<int>>& perms,
                                           int base, std::string origin) {
  if (static_cast<int>(perms.size()) != group->rank() || perms.front().empty())
    throw Error(ErrorKind::InvariantViolation, "action needs one permutation per generator");
  const auto inverse = invert_perms(perms);
  auto words = shortlex_transversal(group, perms, inverse, base);

  std::vector<int> reached;
  for (int s = 0; s < static_cast<int>(words.size()); ++s)
    if (words[s]) reached.push_back(s);
  std::sort(reached.begin(), reached.end(),
            [&](int a, int b) { return shortlex_less(*words[a], *words[b]); });
  std::vector<int> relabel(words.size(), -1);
  for (std::size_t k = 0; k < reached.size(); ++k) relabel[reached[k]] = static_cast<int>(k);

  std::vector<std::vector<int>> canon(perms.size(), std::vector<int>(reached.size()));
  for (std::size_t g = 0; g < perms.size(); ++g)
    for (std::size_t k = 0; k < reached.size(); ++k) canon[g][k] = relabel[perms[g][reached[k]]];
  std::vector<Word> transversal;
  transversal.reserve(reached.size());
  for (int s : reached) transversal.push_back(std::move(*words[s]));
  return SubgroupHandle(CosetTable(std::move(group), std::move(canon)), std::move(transversal),
                        std::move(origin));
}

int SubgroupHandle::coset_of(const Word& w) const { return table_.act(w, 0); }

int coset_of(const SubgroupHandle& sub, const Word& w) { return sub.coset_of(w); }

SubgroupHandle whole_group(const GroupPtr& group) {
  std::vector<std::vector<int>> perms(group->rank(), std::vector<int>{0});
  return SubgroupHandle::from_action(group, perms, 0, "whole group");
}

SubgroupHandle stabilizer_of_action(const GroupPtr& group,
                                    const std::vector<std::vector<int>>& perms, int point) {
  return SubgroupHandle::from_action(group, perms, point, "stabilizer of point " + std::to_string(point));
}

// ---------------------------------------------------------------- construction from generators

namespace {

// Stallings folding of a bouquet of loops at vertex 0.
class Folder {
 public:
  explicit Folder(int nsym) : nsym_(nsym) { add_vertex(); }

  int add_vertex() {
    out_.emplace_back(nsym_, -1);
    parent_.push_back(static_cast<int>(parent_.size()));
    return static_cast<int>(parent_.size()) - 1;
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void add_edge(int u, int sym, int v) {
    link(find(u), sym, find(v));
    link(find(v), sym ^ 1, find(u));
    drain();
  }

  int vertex_count() const { return static_cast<int>(parent_.size()); }
  std::vector<int>& out(int v) { return out_[v]; }

 private:
  void link(int u, int sym, int v) {
    int& slot = out_[u][sym];
    if (slot == -1)
      slot = v;
    else if (find(slot) != v)
      pending_.emplace_back(slot, v);
  }

  void drain() {
    while (!pending_.empty()) {
      auto [a, b] = pending_.front();
      pending_.pop_front();
      a = find(a);
      b = find(b);
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      parent_[b] = a;
      for (int sym = 0; sym < nsym_; ++sym) {
        const int t = out_[b][sym];
        if (t == -1) continue;
        int& slot = out_[a][sym];
        if (slot == -1)
          slot = t;
        else if (find(slot) != find(t))
          pending_.emplace_back(slot, t);
      }
    }
  }

  int nsym_;
  std::vector<std::vector<int>> out_;
  std::vector<int> parent_;
  std::deque<std::pair<int, int>> pending_;
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

SubgroupHandle free_subgroup(const GroupPtr& group, const std::vector<Word>& gens,
                             std::size_t max_states, const std::string& origin) {
  const int nsym = 2 * group->rank();
  std::size_t total = 0;
  for (const auto& g : gens) total += g.length();
  if (total > 16 * max_states + 16)
    throw Error(ErrorKind::StateCap, "generator loops exceed " + std::to_string(max_states) + " states");

  Folder f(nsym);
  for (const auto& g : gens) {
    const auto& ls = g.data();
    int cur = 0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
      const int next = (k + 1 == ls.size()) ? 0 : f.add_vertex();
      f.add_edge(cur, symbol_of(ls[k]), next);
      cur = next;
    }
  }

  std::vector<int> roots;
  std::vector<int> id(f.vertex_count(), -1);
  for (int v = 0; v < f.vertex_count(); ++v)
    if (f.find(v) == v) {
      id[v] = static_cast<int>(roots.size());
      roots.push_back(v);
    }
  if (roots.size() > max_states)
    throw Error(ErrorKind::StateCap, "folded graph has " + std::to_string(roots.size()) +
                                         " vertices, cap " + std::to_string(max_states));
  std::vector<std::vector<int>> perms(group->rank(), std::vector<int>(roots.size(), -1));
  for (std::size_t k = 0; k < roots.size(); ++k) {
    auto& o = f.out(roots[k]);
    for (int sym = 0; sym < nsym; ++sym) {
      if (o[sym] == -1)
        throw Error(ErrorKind::NotFiniteIndex,
                    "folded graph is incomplete (vertex " + std::to_string(k) + " lacks an edge)");
      // graph edges give the right action on right cosets; the left action
      // on left cosets is its inverse
      if (sym % 2 == 1) perms[sym / 2][k] = id[f.find(o[sym])];
    }
  }
  return SubgroupHandle::from_action(group, perms, 0, origin);
}

SubgroupHandle abelian_subgroup(const GroupPtr& group, const std::vector<Word>& gens,
                                std::size_t max_states, const std::string& origin) {
  const auto d = static_cast<std::size_t>(group->rank());
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& g : gens) rows.push_back(g.data());
  const auto h = hermite_normal_form(IntegerMatrix::from_rows(rows, d));
  if (h.rows() < d) throw Error(ErrorKind::NotFiniteIndex, "lattice is not full rank");
  std::vector<std::int64_t> diag(d);
  std::size_t index = 1;
  for (std::size_t i = 0; i < d; ++i) {
    diag[i] = h(i, i);
    index *= static_cast<std::size_t>(diag[i]);
    if (index > max_states)
      throw Error(ErrorKind::StateCap, "lattice index exceeds cap " + std::to_string(max_states));
  }
  auto reduce_vec = [&](std::vector<std::int64_t> v) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto q = floor_div(v[i], diag[i]);
      if (q != 0)
        for (std::size_t j = i; j < d; ++j) v[j] -= q * h(i, j);
    }
    return v;
  };
  auto encode = [&](const std::vector<std::int64_t>& v) {
    std::size_t code = 0;
    for (std::size_t i = 0; i < d; ++i) code = code * static_cast<std::size_t>(diag[i]) + static_cast<std::size_t>(v[i]);
    return static_cast<int>(code);
  };
  std::vector<std::vector<int>> perms(d, std::vector<int>(index));
  std::vector<std::int64_t> v(d, 0);
  for (std::size_t code = 0; code < index; ++code) {
    std::size_t c = code;
    for (std::size_t i = d; i-- > 0;) {
      v[i] = static_cast<std::int64_t>(c % static_cast<std::size_t>(diag[i]));
      c /= static_cast<std::size_t>(diag[i]);
    }
    for (std::size_t g = 0; g < d; ++g) {
      auto w = v;
      w[g] += 1;
      perms[g][code] = encode(reduce_vec(w));
    }
  }
  return SubgroupHandle::from_action(group, perms, 0, origin);
}

}  // namespace

SubgroupHandle subgroup_from_generators(const GroupPtr& group, const std::vector<Word>& gens,
                                        std::size_t max_states) {
  std::vector<Word> nontrivial;
  std::string origin = "generated by {";
  for (const auto& g : gens) {
    require_same_group(group, g.group());
    if (!g.is_identity()) nontrivial.push_back(g);
    origin += (origin.back() == '{' ? "" : ", ") + g.to_string();
  }
  origin += "}";
  if (nontrivial.empty()) throw Error(ErrorKind::NotFiniteIndex, "no nontrivial generators");
  return group->kind() == GroupKind::Free ? free_subgroup(group, nontrivial, max_states, origin)
                                          : abelian_subgroup(group, nontrivial, max_states, origin);
}

// ---------------------------------------------------------------- subgroup operations

SchreierData schreier_data(const SubgroupHandle& h) {
  SchreierData out;
  out.transversal = h.transversal();
  std::set<Word, ShortlexLess> gens;
  const auto& group = h.group();
  for (int i = 0; i < h.index(); ++i)
    for (int g = 0; g < group->rank(); ++g) {
      const int j = h.table().perms()[g][i];
      // a t_i Γ = t_j Γ, hence t_j^-1 a t_i ∈ Γ.
      Word s = invert(out.transversal[j]) * Word::generator(group, g) * out.transversal[i];
      if (!s.is_identity()) gens.insert(std::move(s));
    }
  out.generators.assign(gens.begin(), gens.end());
  return out;
}

Containment contains_subgroup(const SubgroupHandle& outer, const SubgroupHandle& inner) {
  require_same_group(outer.group(), inner.group());
  for (const auto& s : schreier_data(inner).generators)
    if (!outer.contains(s)) return {false, s};
  return {true, std::nullopt};
}

SubgroupHandle intersect(const SubgroupHandle& h1, const SubgroupHandle& h2, std::size_t max_states) {
  require_same_group(h1.group(), h2.group());
  const auto& group = h1.group();
  const int rank = group->rank();
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> states{{0, 0}};
  id[{0, 0}] = 0;
  std::vector<std::vector<int>> perms(rank);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto [a, b] = states[k];
    for (int g = 0; g < rank; ++g) {
      const std::pair<int, int> t{h1.table().perms()[g][a], h2.table().perms()[g][b]};
      auto [it, inserted] = id.emplace(t, static_cast<int>(states.size()));
      if (inserted) {
        states.push_back(t);
        if (states.size() > max_states)
          throw Error(ErrorKind::StateCap, "intersection exceeds " + std::to_string(max_states) + " states");
      }
      perms[g].push_back(it->second);
    }
  }
  return SubgroupHandle::from_action(group, perms, 0, "intersection");
}

SubgroupHandle normal_core(const SubgroupHandle& h, std::size_t cap) {
  const auto& group = h.group();
  const int rank = group->rank();
  const auto& rho = h.table().perms();
  std::vector<int> identity(h.index());
  std::iota(identity.begin(), identity.end(), 0);

  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> elements{identity};
  id[identity] = 0;
  std::vector<std::vector<int>> perms(rank);
  for (std::size_t k = 0; k < elements.size(); ++k) {
    for (int g = 0; g < rank; ++g) {
      std::vector<int> composed(h.index());
      for (int x = 0; x < h.index(); ++x) composed[x] = rho[g][elements[k][x]];
      auto [it, inserted] = id.emplace(composed, static_cast<int>(elements.size()));
      if (inserted) {
        elements.push_back(std::move(composed));
        if (elements.size() > cap)
          throw Error(ErrorKind::CoreCap, "permutation image exceeds " + std::to_string(cap) + " elements");
      }
      perms[g].push_back(it->second);
    }
  }
  return SubgroupHandle::from_action(group, perms, 0, "normal core");
}

SubgroupHandle conjugate(const SubgroupHandle& h, const Word& g) {
  require_same_group(h.group(), g.group());
  return SubgroupHandle::from_action(h.group(), h.table().perms(), h.coset_of(g),
                                     "conjugate by " + g.to_string());
}

bool is_normal(const SubgroupHandle& h) {
  for (const auto& s : schreier_data(h).generators)
    for (int state = 0; state < h.index(); ++state)
      if (h.table().act(s, state) != state) return false;
  return true;
}

std::uint64_t EigenLattice::quotient_order() const {
  std::uint64_t n = 1;
  for (auto t : torsion) n *= static_cast<std::uint64_t>(t);
  return n;
}

std::string EigenLattice::quotient_string() const {
  std::string out;
  for (auto t : torsion) out += (out.empty() ? "" : " x ") + ("Z/" + std::to_string(t));
  for (std::size_t k = 0; k < free_rank; ++k) out += (out.empty() ? "" : " x ") + std::string("Z");
  return out.empty() ? "0" : out;
}

EigenLattice eigen_lattice_snf(const SubgroupHandle& h) {
  const auto rank = static_cast<std::size_t>(h.group()->rank());
  std::vector<std::vector<std::int64_t>> rows;
  for (const auto& s : schreier_data(h).generators) rows.push_back(abelianize(s));
  EigenLattice e;
  e.lattice = IntegerMatrix::from_rows(rows, rank);
  e.smith = smith_normal_form(e.lattice);
  e.snf = e.smith.diagonal;
  for (auto x : e.snf)
    if (x > 1) e.torsion.push_back(x);
  e.free_rank = rank - e.smith.rank;
  return e;
}

}  // namespace odoforge
