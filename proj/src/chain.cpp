#include "odoforge/chain.hpp"

#include <algorithm>
#include <numeric>

namespace odoforge {

NestingError::NestingError(int level, Word witness)
    : Error(ErrorKind::NestingViolation, "level " + std::to_string(level) + " does not contain level " +
                                             std::to_string(level + 1) + ", witness " + witness.to_string()),
      level_(level),
      witness_(std::move(witness)) {}

Chain Chain::from_subgroups(const GroupPtr& group, std::vector<SubgroupHandle> levels) {
  if (levels.empty()) throw Error(ErrorKind::SemanticError, "chain needs at least one level beyond G");
  Chain c;
  c.group_ = group;
  c.levels_.push_back(std::make_shared<const SubgroupHandle>(whole_group(group)));
  for (auto& h : levels) {
    require_same_group(group, h.group());
    c.levels_.push_back(std::make_shared<const SubgroupHandle>(std::move(h)));
  }
  for (int n = 0; n + 1 < static_cast<int>(c.levels_.size()); ++n) {
    auto inc = contains_subgroup(c.level(n), c.level(n + 1));
    if (!inc.contained) throw NestingError(n, *inc.witness);
    if (c.index(n + 1) % c.index(n) != 0)
      throw Error(ErrorKind::InvariantViolation, "index does not divide along the chain");
  }
  for (int n = 0; n <= c.depth(); ++n) c.normal_.push_back(is_normal(c.level(n)));
  for (int n = 0; n < c.depth(); ++n) {
    std::vector<int> proj;
    for (const auto& t : c.level(n + 1).transversal()) proj.push_back(c.level(n).coset_of(t));
    c.projection_.push_back(std::move(proj));
  }
  return c;
}

Chain Chain::truncate(int n) const {
  if (n < 0 || n > depth()) throw Error(ErrorKind::SemanticError, "truncation beyond chain depth");
  Chain c = *this;
  c.levels_.resize(static_cast<std::size_t>(n) + 1);
  c.normal_.resize(static_cast<std::size_t>(n) + 1);
  c.projection_.resize(static_cast<std::size_t>(n));
  return c;
}

Chain validate_chain(const GroupPtr& group, const std::vector<std::vector<Word>>& level_gens, int depth,
                     const Caps& caps) {
  if (depth < 1) throw Error(ErrorKind::SemanticError, "depth must be at least 1");
  if (static_cast<std::size_t>(depth) > level_gens.size())
    throw Error(ErrorKind::SemanticError, "depth " + std::to_string(depth) + " exceeds the " +
                                              std::to_string(level_gens.size()) + " configured levels");
  std::vector<SubgroupHandle> levels;
  for (int n = 0; n < depth; ++n)
    levels.push_back(subgroup_from_generators(group, level_gens[static_cast<std::size_t>(n)], caps.max_states));
  return Chain::from_subgroups(group, std::move(levels));
}

std::vector<Word> residuality_witnesses(const Chain& chain, int radius, const BallCaps& caps) {
  std::vector<Word> out;
  const auto& last = chain.level(chain.depth());
  for (auto& w : ball_enumerate(chain.group(), radius, caps))
    if (!w.is_identity() && last.contains(w)) out.push_back(std::move(w));
  return out;
}

TruncatedPoint point_of(const Chain& chain, const Word& g, int depth) {
  TruncatedPoint p;
  for (int n = 0; n <= depth; ++n) p.coords.push_back(chain.level(n).coset_of(g));
  return p;
}

bool is_compatible(const Chain& chain, const TruncatedPoint& p) {
  if (p.coords.empty() || p.depth() > chain.depth() || p.coords[0] != 0) return false;
  for (int n = 0; n <= p.depth(); ++n) {
    const int s = p.coords[static_cast<std::size_t>(n)];
    if (s < 0 || s >= chain.index(n)) return false;
    if (n > 0 && chain.project(n - 1, s) != p.coords[static_cast<std::size_t>(n) - 1]) return false;
  }
  return true;
}

std::vector<TruncatedPoint> all_points(const Chain& chain, int depth) {
  std::vector<TruncatedPoint> out{TruncatedPoint{{0}}};
  for (int n = 1; n <= depth; ++n) {
    std::vector<TruncatedPoint> next;
    for (const auto& p : out)
      for (int s = 0; s < chain.index(n); ++s)
        if (chain.project(n - 1, s) == p.coords.back()) {
          auto q = p;
          q.coords.push_back(s);
          next.push_back(std::move(q));
        }
    out = std::move(next);
  }
  return out;
}

TruncatedPoint act_truncated(const Chain& chain, const Word& g, const TruncatedPoint& p) {
  TruncatedPoint q;
  q.coords.reserve(p.coords.size());
  for (int n = 0; n <= p.depth(); ++n)
    q.coords.push_back(chain.level(n).table().act(g, p.coords[static_cast<std::size_t>(n)]));
  if (!is_compatible(chain, q)) throw Error(ErrorKind::InvariantViolation, "action broke compatibility");
  return q;
}

std::vector<Word> stabilizer_by_formula(const Chain& chain, const TruncatedPoint& p, int radius,
                                        const BallCaps& caps) {
  std::vector<SubgroupHandle> conj;
  for (int n = 0; n <= p.depth(); ++n)
    conj.push_back(conjugate(chain.level(n), chain.level(n).transversal()[static_cast<std::size_t>(p.coords[n])]));
  std::vector<Word> out;
  for (auto& w : ball_enumerate(chain.group(), radius, caps))
    if (std::all_of(conj.begin(), conj.end(), [&](const SubgroupHandle& h) { return h.contains(w); }))
      out.push_back(std::move(w));
  return out;
}

std::vector<Word> stabilizer_ball(const Chain& chain, const TruncatedPoint& p, int radius, const BallCaps& caps) {
  std::vector<Word> out;
  for (auto& w : ball_enumerate(chain.group(), radius, caps))
    if (act_truncated(chain, w, p) == p) out.push_back(std::move(w));
  if (out != stabilizer_by_formula(chain, p, radius, caps))
    throw Error(ErrorKind::InvariantViolation, "stabilizer scan disagrees with the conjugate intersection");
  return out;
}

std::vector<Word> return_times(const Chain& chain, int level, int state, const TruncatedPoint& p, int radius,
                               const BallCaps& caps) {
  if (level < 0 || level > p.depth() || p.coords[static_cast<std::size_t>(level)] != state)
    throw Error(ErrorKind::PointNotInCylinder,
                "point is not in cylinder [" + std::to_string(level) + ";" + std::to_string(state) + "]");
  const auto& table = chain.level(level).table();
  std::vector<Word> out;
  for (auto& w : ball_enumerate(chain.group(), radius, caps))
    if (table.act(w, state) == state) out.push_back(std::move(w));
  return out;
}

FactorMap factor_between(const Chain& source, const Chain& target) {
  require_same_group(source.group(), target.group());
  FactorMap f;
  f.source_ = std::make_shared<const Chain>(source);
  f.target_ = std::make_shared<const Chain>(target);
  int k = 0;
  for (int i = 0; i <= target.depth(); ++i) {
    while (k <= source.depth() && !contains_subgroup(target.level(i), source.level(k)).contained) ++k;
    if (k > source.depth()) {
      f.failed_level_ = i;
      f.witness_ = contains_subgroup(target.level(i), source.level(source.depth())).witness;
      return f;
    }
    f.k_.push_back(k);
  }
  return f;
}

TruncatedPoint FactorMap::apply(const TruncatedPoint& p) const {
  if (!ok()) throw Error(ErrorKind::SemanticError, "no factor map between these chains");
  if (p.depth() < k_.back())
    throw Error(ErrorKind::SemanticError, "point too shallow for the factor map");
  TruncatedPoint q;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    const int k = k_[i];
    const auto& rep = source_->level(k).transversal()[static_cast<std::size_t>(p.coords[static_cast<std::size_t>(k)])];
    q.coords.push_back(target_->level(static_cast<int>(i)).coset_of(rep));
  }
  return q;
}

NormalCover normal_cover(const Chain& chain, std::size_t cap) {
  std::vector<SubgroupHandle> cores;
  for (int n = 1; n <= chain.depth(); ++n) cores.push_back(normal_core(chain.level(n), cap));
  auto cover = Chain::from_subgroups(chain.group(), std::move(cores));
  auto map = factor_between(cover, chain);
  if (!map.ok()) throw Error(ErrorKind::InvariantViolation, "normal cover does not factor onto the chain");
  return {std::move(cover), std::move(map)};
}

CharacterGroup eigenvalue_group(const Chain& chain, int n, std::size_t cap) {
  if (n < 0 || n > chain.depth()) throw Error(ErrorKind::SemanticError, "level beyond chain depth");
  CharacterGroup cg;
  cg.level = n;
  cg.lattice = eigen_lattice_snf(chain.level(n));
  const auto rank = static_cast<std::size_t>(chain.group()->rank());
  const auto& v = cg.lattice.smith.v;
  const auto& diag = cg.lattice.smith.diagonal;
  if (cg.lattice.quotient_order() > cap)
    throw Error(ErrorKind::CoreCap, "character group larger than " + std::to_string(cap));

  // q = V r with r_i = k_i / d_i; free coordinates fixed at 0.
  std::vector<std::int64_t> k(diag.size(), 0);
  while (true) {
    CharacterVector q(rank, Rational(0));
    for (std::size_t j = 0; j < rank; ++j)
      for (std::size_t i = 0; i < diag.size(); ++i)
        if (k[i] != 0) q[j] += Rational(v(j, i) * k[i], diag[i]);
    for (auto& x : q) x = frac(x);
    cg.characters.push_back(std::move(q));
    std::size_t i = 0;
    while (i < diag.size() && ++k[i] == diag[i]) k[i++] = 0;
    if (i == diag.size()) break;
  }
  std::sort(cg.characters.begin(), cg.characters.end());
  return cg;
}

Rational character_eval(const CharacterVector& chi, const Word& g) {
  const auto e = abelianize(g);
  Rational s(0);
  for (std::size_t j = 0; j < chi.size(); ++j) s += chi[j] * e[j];
  return frac(s);
}

Rational eigenfunction(const Chain& chain, int n, const CharacterVector& chi, const TruncatedPoint& p) {
  return character_eval(chi, chain.level(n).transversal()[static_cast<std::size_t>(p.coords.at(static_cast<std::size_t>(n)))]);
}

Rational haar_cylinder(const Chain& chain, int level) {
  return Rational(1, chain.index(level));
}

}  // namespace odoforge
