#pragma once

#include "odoforge/coset.hpp"
#include "odoforge/error.hpp"
#include "odoforge/rational.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace odoforge {

// Raised when a chain is not nested: Γ_level does not contain Γ_{level+1}.
class NestingError : public Error {
 public:
  NestingError(int level, Word witness);
  int level() const noexcept { return level_; }
  const Word& witness() const noexcept { return witness_; }

 private:
  int level_;
  Word witness_;
};

/// Validated nested chain G = Γ_0 ⊇ Γ_1 ⊇ ... ⊇ Γ_N of finite-index subgroups.
class Chain {
 public:
  // `levels` holds Γ_1..Γ_N; Γ_0 is added. Throws NestingError.
  static Chain from_subgroups(const GroupPtr& group, std::vector<SubgroupHandle> levels);

  const GroupPtr& group() const noexcept { return group_; }
  int depth() const noexcept { return static_cast<int>(levels_.size()) - 1; }
  const SubgroupHandle& level(int n) const { return *levels_.at(static_cast<std::size_t>(n)); }
  int index(int n) const { return level(n).index(); }

  // [Γ_n : Γ_{n+1}] >= 2, for n < depth.
  bool strict(int n) const { return index(n + 1) > index(n); }
  bool normal(int n) const { return normal_.at(static_cast<std::size_t>(n)); }

  // Image of a Γ_{n+1}-state in G/Γ_n.
  int project(int n, int state) const {
    return projection_[static_cast<std::size_t>(n)][static_cast<std::size_t>(state)];
  }

  // Levels 0..n only.
  Chain truncate(int n) const;

 private:
  Chain() = default;

  GroupPtr group_;
  std::vector<std::shared_ptr<const SubgroupHandle>> levels_;
  std::vector<bool> normal_;
  std::vector<std::vector<int>> projection_;
};

// Builds Γ_1..Γ_N from generator lists (only the first N are used).
Chain validate_chain(const GroupPtr& group, const std::vector<std::vector<Word>>& level_gens, int depth,
                     const Caps& caps = default_caps());

// Nontrivial elements of Γ_N within ball(radius). Empty means the chain is
// residual at (radius, N).
std::vector<Word> residuality_witnesses(const Chain& chain, int radius,
                                        const BallCaps& caps = default_caps().ball);

/// Compatible sequence of coset ids (g_0, ..., g_N).
struct TruncatedPoint {
  std::vector<int> coords;

  int depth() const noexcept { return static_cast<int>(coords.size()) - 1; }
  bool operator==(const TruncatedPoint&) const = default;
  auto operator<=>(const TruncatedPoint&) const = default;
};

// The point (gΓ_0, ..., gΓ_N).
TruncatedPoint point_of(const Chain& chain, const Word& g, int depth);
inline TruncatedPoint identity_point(const Chain& chain, int depth) {
  return point_of(chain, Word::identity(chain.group()), depth);
}
bool is_compatible(const Chain& chain, const TruncatedPoint& p);
// All compatible points at the given depth, in lexicographic order.
std::vector<TruncatedPoint> all_points(const Chain& chain, int depth);

TruncatedPoint act_truncated(const Chain& chain, const Word& g, const TruncatedPoint& p);

// {g in ball : g.p = p}, checked against stabilizer_by_formula.
std::vector<Word> stabilizer_ball(const Chain& chain, const TruncatedPoint& p, int radius,
                                  const BallCaps& caps = default_caps().ball);
// ball ∩ ⋂_n t_n Γ_n t_n^-1 with t_n the transversal word of g_n.
std::vector<Word> stabilizer_by_formula(const Chain& chain, const TruncatedPoint& p, int radius,
                                        const BallCaps& caps = default_caps().ball);

// {g in ball : (g.p)_level = state}; requires p_level = state.
std::vector<Word> return_times(const Chain& chain, int level, int state, const TruncatedPoint& p,
                               int radius, const BallCaps& caps = default_caps().ball);

/// Result of comparing two chains: level i of the target is refined by level
/// k_i of the source.
class FactorMap {
 public:
  bool ok() const noexcept { return !failed_level_; }
  const std::vector<int>& levels() const noexcept { return k_; }
  std::optional<int> failed_level() const noexcept { return failed_level_; }
  // Element of Γ¹_{N1} outside Γ²_{failed_level}.
  const std::optional<Word>& witness() const noexcept { return witness_; }

  // Source point (depth >= max k_i) to target point of depth N2.
  TruncatedPoint apply(const TruncatedPoint& p) const;

 private:
  friend FactorMap factor_between(const Chain&, const Chain&);
  std::shared_ptr<const Chain> source_;
  std::shared_ptr<const Chain> target_;
  std::vector<int> k_;
  std::optional<int> failed_level_;
  std::optional<Word> witness_;
};

FactorMap factor_between(const Chain& source, const Chain& target);

struct NormalCover {
  Chain cover;
  FactorMap map;  // cover -> original
};

NormalCover normal_cover(const Chain& chain, std::size_t cap = default_caps().core_cap);

// Character a_j -> exp(2πi q_j) of the abelianization, q_j in [0, 1).
using CharacterVector = std::vector<Rational>;

struct CharacterGroup {
  int level = 0;
  EigenLattice lattice;
  // Torsion characters trivial on Γ_level, sorted lexicographically. When
  // free_rank > 0 the group is infinite and only these are listed.
  std::vector<CharacterVector> characters;
  bool infinite() const noexcept { return lattice.free_rank > 0; }
};

CharacterGroup eigenvalue_group(const Chain& chain, int n, std::size_t cap = default_caps().core_cap);

// χ(g) as a rational mod 1.
Rational character_eval(const CharacterVector& chi, const Word& g);

// Step eigenfunction: χ of the transversal word of p's level-n coordinate.
Rational eigenfunction(const Chain& chain, int n, const CharacterVector& chi, const TruncatedPoint& p);

Rational haar_cylinder(const Chain& chain, int level);

}  // namespace odoforge
