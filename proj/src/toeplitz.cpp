#include "odoforge/toeplitz.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace odoforge {

namespace {

std::vector<Word> coset_transversal_within(const Chain& chain, int n, const BallCaps& search) {
  const auto& outer = chain.level(n);
  const auto& inner = chain.level(n + 1);
  const auto need = static_cast<std::size_t>(inner.index() / outer.index());
  std::vector<char> seen(static_cast<std::size_t>(inner.index()), 0);
  std::vector<Word> out;
  for (int r = 0; out.size() < need; ++r) {
    std::vector<Word> sphere;
    try {
      sphere = sphere_enumerate(chain.group(), r, search);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RadiusCap) throw;
      throw Error(ErrorKind::TransversalSearchCap,
                  "K_" + std::to_string(n) + ": found " + std::to_string(out.size()) + " of " +
                      std::to_string(need) + " cosets within radius " + std::to_string(r - 1));
    }
    for (auto& w : sphere) {
      if (!outer.contains(w)) continue;
      auto& s = seen[static_cast<std::size_t>(inner.coset_of(w))];
      if (s) continue;
      s = 1;
      out.push_back(std::move(w));
      if (out.size() == need) break;
    }
  }
  return out;
}

std::vector<Word> subgroup_ball(const SubgroupHandle& h, int radius, const BallCaps& caps) {
  std::vector<Word> out;
  for (auto& w : ball_enumerate(h.group(), radius, caps))
    if (h.contains(w)) out.push_back(std::move(w));
  return out;
}

void require_window(const ToeplitzSpec& spec, const std::vector<Word>& window) {
  for (const auto& w : window)
    if (!spec.in_tower(w))
      throw Error(ErrorKind::WindowOutsideTower,
                  w.to_string() + " is outside D_" + std::to_string(spec.depth()));
}

}  // namespace

ToeplitzSpec ToeplitzSpec::build(const Chain& full, int depth, const BallCaps& search) {
  if (depth < 1 || depth > full.depth())
    throw Error(ErrorKind::SemanticError, "depth " + std::to_string(depth) + " outside 1.." +
                                              std::to_string(full.depth()));
  ToeplitzSpec spec;
  spec.chain_ = std::make_shared<const Chain>(full.truncate(depth));
  const Chain& chain = *spec.chain_;
  const int N = depth;
  const auto group = chain.group();

  int m = 0;
  while (chain.index(m) != chain.index(N)) ++m;
  if (m < N) {
    spec.mode_ = ToeplitzMode::Finite;
    spec.stable_ = m;
  }
  const int strict_until = spec.stable_ ? m : N;
  for (int n = 0; n < strict_until; ++n)
    if (!chain.strict(n))
      throw Error(ErrorKind::IndexOneLevel, "[Γ_" + std::to_string(n) + " : Γ_" + std::to_string(n + 1) +
                                                "] = 1 before the chain stabilizes");

  auto& tw = spec.tower_;
  tw.d.push_back({Word::identity(group)});
  for (int n = 0; n < N; ++n) {
    tw.k.push_back(n < strict_until ? coset_transversal_within(chain, n, search)
                                    : std::vector<Word>{Word::identity(group)});
    std::vector<Word> next;
    for (const auto& k : tw.k.back())
      for (const auto& d : tw.d.back()) next.push_back(d * k);
    std::vector<char> seen(static_cast<std::size_t>(chain.index(n + 1)), 0);
    for (const auto& w : next) {
      auto& s = seen[static_cast<std::size_t>(chain.level(n + 1).coset_of(w))];
      if (s) throw Error(ErrorKind::InvariantViolation, "D_" + std::to_string(n + 1) + " repeats a coset");
      s = 1;
    }
    if (next.size() != seen.size())
      throw Error(ErrorKind::InvariantViolation, "D_" + std::to_string(n + 1) + " is not a fundamental domain");
    tw.d.push_back(std::move(next));
  }
  for (std::size_t i = 0; i < tw.d.back().size(); ++i) spec.top_domain_.emplace(tw.d.back()[i], static_cast<int>(i));

  if (spec.mode_ == ToeplitzMode::Generic) {
    auto& mk = spec.markers_;
    mk.s.push_back({Word::identity(group)});
    mk.v.push_back(Word::identity(group));
    for (int n = 1; n <= N; ++n) {
      std::vector<Word> s;
      const auto& dn = tw.d[static_cast<std::size_t>(n)];
      const auto prev = tw.d[static_cast<std::size_t>(n) - 1].size();  // D_{n-1} is a prefix of D_n
      if (n == 1) {
        s.push_back(*std::min_element(dn.begin() + 1, dn.end(), ShortlexLess{}));
      } else {
        const auto& lvl = chain.level(n - 1);
        const int target = lvl.coset_of(mk.v.back());
        for (std::size_t i = prev; i < dn.size(); ++i)
          if (lvl.coset_of(dn[i]) == target) s.push_back(dn[i]);
        std::vector<Word> expected;
        for (const auto& k : tw.k[static_cast<std::size_t>(n) - 1])
          if (!k.is_identity()) expected.push_back(mk.v.back() * k);
        std::sort(expected.begin(), expected.end(), ShortlexLess{});
        std::sort(s.begin(), s.end(), ShortlexLess{});
        if (s != expected) throw Error(ErrorKind::InvariantViolation, "S_" + std::to_string(n) + " mismatch");
      }
      std::sort(s.begin(), s.end(), ShortlexLess{});
      if (s.empty()) throw Error(ErrorKind::InvariantViolation, "empty marker set S_" + std::to_string(n));
      mk.v.push_back(s.front());
      mk.s.push_back(std::move(s));
      const auto& v = mk.v;
      if (chain.level(n - 1).coset_of(v[static_cast<std::size_t>(n)]) != chain.level(n - 1).coset_of(v[static_cast<std::size_t>(n) - 1]))
        throw Error(ErrorKind::InvariantViolation, "markers are not nested at level " + std::to_string(n));
    }
    for (int j = 0; j < N; ++j) {
      const auto& lvl = chain.level(j + 1);
      std::vector<char> hit(static_cast<std::size_t>(lvl.index()), 0);
      for (const auto& s : mk.s[static_cast<std::size_t>(j)]) hit[static_cast<std::size_t>(lvl.coset_of(s))] = 1;
      spec.hit_.push_back(std::move(hit));
    }
    for (int j = 0; j <= N; ++j) spec.marker_state_.push_back(chain.level(j).coset_of(mk.v[static_cast<std::size_t>(j)]));
  }

  const int top = spec.top_level();
  for (int s = 0; s < chain.index(top); ++s) {
    std::vector<int> coords(static_cast<std::size_t>(top) + 1);
    coords[static_cast<std::size_t>(top)] = s;
    for (int n = top; n > 0; --n)
      coords[static_cast<std::size_t>(n) - 1] = chain.project(n - 1, coords[static_cast<std::size_t>(n)]);
    spec.by_state_.push_back(spec.evaluate_coords(coords));
  }
  return spec;
}

ToeplitzValue ToeplitzSpec::evaluate_coords(const std::vector<int>& coords) const {
  if (mode_ == ToeplitzMode::Finite) return {coords.back() == 0 ? 0 : 1, true, *stable_};
  const int N = depth();
  std::optional<int> first;
  int hits = 0;
  for (int m = 0; m < N; ++m)
    if (hit_[static_cast<std::size_t>(m)][static_cast<std::size_t>(coords[static_cast<std::size_t>(m) + 1])]) {
      if (!first) first = m;
      ++hits;
    }
  if (hits > 1) throw Error(ErrorKind::InvariantViolation, "marker cosets overlap");
  if (first) return {*first % 2, true, *first};
  for (int m = 1; m < N; ++m)
    if (coords[static_cast<std::size_t>(m)] != marker_state_[static_cast<std::size_t>(m)]) return {1, true, m};
  return {1, false, std::nullopt};
}

std::optional<int> ToeplitzSpec::certify(const Word& w, int n) const {
  if (n < 0 || n > depth()) throw Error(ErrorKind::SemanticError, "level beyond spec depth");
  if (mode_ == ToeplitzMode::Finite) {
    if (n < *stable_) return std::nullopt;
    return top().contains(w) ? 0 : 1;
  }
  for (int j = 0; j < n; ++j)
    if (hit_[static_cast<std::size_t>(j)][static_cast<std::size_t>(chain_->level(j + 1).coset_of(w))]) return j % 2;
  if (n >= 2 && chain_->level(n - 1).coset_of(w) != marker_state_[static_cast<std::size_t>(n) - 1]) return 1;
  return std::nullopt;
}

ToeplitzSpec build_tower_and_markers(const Chain& chain, int depth, const BallCaps& search) {
  return ToeplitzSpec::build(chain, depth, search);
}

ToeplitzValue evaluate(const ToeplitzSpec& spec, const Word& w) { return spec.evaluate(w); }

std::string dump_array(const ToeplitzSpec& spec, const std::vector<Word>& window) {
  std::ostringstream out;
  for (const auto& w : window) {
    const auto v = spec.evaluate(w);
    out << w.to_string() << ' ' << v.symbol << ' ' << (v.exact ? "exact" : "provisional") << ' '
        << (v.level ? std::to_string(*v.level) : "-") << '\n';
  }
  return out.str();
}

PerReport per_report(const ToeplitzSpec& spec, int n, const std::vector<Word>& window, int test_radius) {
  require_window(spec, window);
  PerReport r;
  r.level = n;
  const auto gammas = subgroup_ball(spec.chain().level(n), test_radius, default_caps().ball);
  for (const auto& w : window) {
    const auto sigma = spec.certify(w, n);
    if (!sigma) {
      r.residue.push_back(w);
      continue;
    }
    r.certified[*sigma].push_back(w);
    bool bad = false;
    for (const auto& g : gammas) {
      const auto v = spec.evaluate(w * g);
      if (!v.exact) continue;
      ++r.sampled_checks;
      bad = bad || v.symbol != *sigma;
    }
    if (bad) r.contradictions.push_back(w);
  }
  return r;
}

VerifyReport toeplitz_verify(const ToeplitzSpec& spec, const std::vector<Word>& window, int radius) {
  require_window(spec, window);
  VerifyReport rep;
  std::map<int, std::vector<Word>> gammas;
  auto gamma_ball = [&](int n) -> const std::vector<Word>& {
    auto it = gammas.find(n);
    if (it == gammas.end()) it = gammas.emplace(n, subgroup_ball(spec.chain().level(n), radius, default_caps().ball)).first;
    return it->second;
  };
  int worst = 0;
  for (const auto& w : window) {
    VerifyEntry e{w, spec.evaluate(w).symbol, std::nullopt};
    for (int n = 0; n <= spec.depth(); ++n)
      if (auto sigma = spec.certify(w, n)) {
        e.level = n;
        bool bad = *sigma != e.symbol && spec.evaluate(w).exact;
        for (const auto& g : gamma_ball(n)) {
          const auto v = spec.evaluate(w * g);
          if (!v.exact) continue;
          ++rep.sampled_checks;
          bad = bad || v.symbol != *sigma;
        }
        if (bad) rep.contradictions.push_back(w);
        break;
      }
    if (e.level)
      worst = std::max(worst, *e.level);
    else
      rep.uncertified.push_back(w);
    rep.entries.push_back(std::move(e));
  }
  rep.pass = rep.uncertified.empty() && rep.contradictions.empty();
  if (rep.uncertified.empty()) {
    rep.recurrence_level = worst;
    bool ok = true;
    for (const auto& g : gamma_ball(worst))
      for (const auto& w : window) {
        const auto a = spec.evaluate(w);
        const auto b = spec.evaluate(w * g);
        if (a.exact && b.exact && a.symbol != b.symbol) ok = false;
      }
    rep.recurrence_confirmed = ok;
  }
  return rep;
}

std::string_view to_string(Falsification::Outcome o) {
  switch (o) {
    case Falsification::Outcome::Witness: return "witness";
    case Falsification::Outcome::Inconclusive: return "inconclusive";
    case Falsification::Outcome::InGroup: return "in-group";
  }
  return "?";
}

namespace {

struct GammaOrbit {
  std::vector<int> states;
  std::vector<Word> gammas;
};

// States γ·s for γ in Γ_n, each with one γ reaching it.
GammaOrbit gamma_orbit(const ToeplitzSpec& spec, const std::vector<Word>& gens, int start) {
  const auto& table = spec.top().table();
  GammaOrbit o;
  std::vector<int> where(static_cast<std::size_t>(table.size()), -1);
  o.states.push_back(start);
  o.gammas.push_back(Word::identity(spec.group()));
  where[static_cast<std::size_t>(start)] = 0;
  for (std::size_t i = 0; i < o.states.size(); ++i)
    for (const auto& s : gens) {
      const int t = table.act(s, o.states[i]);
      if (where[static_cast<std::size_t>(t)] != -1) continue;
      where[static_cast<std::size_t>(t)] = static_cast<int>(o.states.size());
      o.states.push_back(t);
      o.gammas.push_back(s * o.gammas[i]);
    }
  return o;
}

Falsification falsify_with(const ToeplitzSpec& spec, int n, const Word& g, const std::vector<Word>& gens,
                           const std::vector<Word>& candidates) {
  Falsification f;
  if (spec.chain().level(n).contains(g)) {
    f.outcome = Falsification::Outcome::InGroup;
    return f;
  }
  const auto& table = spec.top().table();
  const auto orbit = gamma_orbit(spec, gens, table.act(g, 0));
  for (const auto& w : candidates) {
    const auto sigma = spec.certify(w, n);
    if (!sigma) continue;
    for (std::size_t i = 0; i < orbit.states.size(); ++i) {
      const auto& v = spec.evaluate_state(table.act(w, orbit.states[i]));
      if (v.exact && v.symbol != *sigma) {
        f.outcome = Falsification::Outcome::Witness;
        f.w = w;
        f.sigma = *sigma;
        f.gamma = orbit.gammas[i];
        return f;
      }
    }
  }
  return f;
}

}  // namespace

Falsification essential_falsify(const ToeplitzSpec& spec, int n, const Word& g, int depth) {
  if (n < 0 || n > spec.depth()) throw Error(ErrorKind::SemanticError, "level beyond spec depth");
  return falsify_with(spec, n, g, schreier_data(spec.chain().level(n)).generators,
                      ball_enumerate(spec.group(), depth, default_caps().ball));
}

PeriodReport period_structure_check(const ToeplitzSpec& spec, int levels, int radius, bool verify_pass,
                                    std::optional<int> depth) {
  if (levels < 0 || levels > spec.depth()) throw Error(ErrorKind::SemanticError, "levels beyond spec depth");
  PeriodReport rep;
  rep.levels = levels;
  rep.radius = radius;
  const auto ball = ball_enumerate(spec.group(), radius, default_caps().ball);
  const auto candidates = ball_enumerate(spec.group(), depth.value_or(radius), default_caps().ball);
  for (int n = 0; n <= levels; ++n) {
    const auto gens = schreier_data(spec.chain().level(n)).generators;
    for (const auto& g : ball) {
      if (spec.chain().level(n).contains(g)) continue;
      auto f = falsify_with(spec, n, g, gens, candidates);
      if (f.outcome == Falsification::Outcome::Witness)
        ++rep.witnesses;
      else
        ++rep.inconclusive;
      rep.entries.push_back({n, g, std::move(f)});
    }
  }
  rep.certificate = verify_pass && rep.inconclusive == 0;
  return rep;
}

TruncatedPoint factor_coords(const ToeplitzSpec& spec, const Word& g, int n) {
  if (n < 0 || n > spec.depth()) throw Error(ErrorKind::SemanticError, "level beyond spec depth");
  return point_of(spec.chain(), g, n);
}

OrbitPatterns orbit_patterns(const ToeplitzSpec& spec, const std::vector<Word>& window, int sample_radius,
                             const BallCaps& caps) {
  const auto& table = spec.top().table();
  OrbitPatterns out;
  std::map<std::vector<int>, std::size_t> index;
  std::vector<char> state_done(static_cast<std::size_t>(table.size()), 0);
  for (const auto& g : ball_enumerate(spec.group(), sample_radius, caps)) {
    const int s = table.act(g, 0);
    std::vector<int> pattern;
    bool exact = true;
    for (const auto& w : window) {
      const auto& v = spec.evaluate_state(table.act(w, s));
      exact = exact && v.exact;
      pattern.push_back(v.symbol);
    }
    if (!exact) {
      ++out.dropped;
      continue;
    }
    if (state_done[static_cast<std::size_t>(s)]) continue;
    state_done[static_cast<std::size_t>(s)] = 1;
    if (index.emplace(pattern, out.patterns.size()).second) out.patterns.push_back({g, std::move(pattern)});
  }
  return out;
}

ExternalArray parse_pattern_file(std::string_view text, const GroupPtr& group) {
  ExternalArray arr{group, {}};
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word, symbol;
    if (!(fields >> word)) continue;
    if (!(fields >> symbol))
      throw Error(ErrorKind::SyntaxError, "line " + std::to_string(lineno) + ": missing symbol");
    int sym = 0;
    try {
      std::size_t used = 0;
      sym = std::stoi(symbol, &used);
      if (used != symbol.size() || sym < 0) throw std::invalid_argument(symbol);
    } catch (const std::exception&) {
      throw Error(ErrorKind::SyntaxError, "line " + std::to_string(lineno) + ": bad symbol '" + symbol + "'");
    }
    Word w = parse_word(word, group);
    if (!arr.values.emplace(w, sym).second)
      throw Error(ErrorKind::SemanticError, "line " + std::to_string(lineno) + ": duplicate position " + word);
  }
  return arr;
}

VerifyReport verify_external(const Chain& chain, const ExternalArray& array, const std::vector<Word>& window,
                             int radius) {
  require_same_group(chain.group(), array.group);
  VerifyReport rep;
  rep.sampled_only = true;
  std::vector<std::vector<Word>> gammas;
  for (int n = 0; n <= chain.depth(); ++n) gammas.push_back(subgroup_ball(chain.level(n), radius, default_caps().ball));
  for (const auto& w : window) {
    auto it = array.values.find(w);
    if (it == array.values.end()) {
      rep.uncertified.push_back(w);
      continue;
    }
    VerifyEntry e{w, it->second, std::nullopt};
    for (int n = 0; n <= chain.depth() && !e.level; ++n) {
      std::size_t samples = 0;
      bool ok = true;
      for (const auto& g : gammas[static_cast<std::size_t>(n)]) {
        if (g.is_identity()) continue;
        auto jt = array.values.find(w * g);
        if (jt == array.values.end()) continue;
        ++samples;
        ok = ok && jt->second == it->second;
      }
      rep.sampled_checks += samples;
      if (ok && samples > 0) e.level = n;
    }
    if (!e.level) rep.uncertified.push_back(w);
    rep.entries.push_back(std::move(e));
  }
  rep.pass = rep.uncertified.empty();
  return rep;
}

}  // namespace odoforge
