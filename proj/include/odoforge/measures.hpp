#pragma once

#include "odoforge/lattice.hpp"
#include "odoforge/rational.hpp"
#include "odoforge/toeplitz.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace odoforge {

/// Finite stand-in for the orbit closure: the G-orbit of the array on the
/// cosets G/Γ_L of the spec's top level, restricted to cosets reached from
/// ball(sample_radius). Point i carries one witness g (x's translate g.x) and
/// its pattern on the window; symbol 2 marks a provisional value.
class SampleSpace {
 public:
  static constexpr int kProvisional = 2;

  const ToeplitzSpec& spec() const noexcept { return *spec_; }
  const std::vector<Word>& window() const noexcept { return window_; }
  int size() const noexcept { return static_cast<int>(witness_.size()); }
  const Word& witness(int p) const { return witness_[static_cast<std::size_t>(p)]; }
  int state(int p) const { return state_[static_cast<std::size_t>(p)]; }
  const std::vector<int>& pattern(int p) const { return pattern_[static_cast<std::size_t>(p)]; }

  std::size_t distinct_patterns() const noexcept { return distinct_; }
  std::size_t provisional_points() const noexcept { return provisional_; }
  // Doubling the radius reaches no new coset.
  bool stable() const noexcept { return stable_; }
  int sample_radius() const noexcept { return radius_; }

  // Point id of h.p; throws TranslateEscapesSpace when that coset was not sampled.
  int translate(const Word& h, int p) const;
  std::optional<int> try_translate(const Word& h, int p) const;
  // Coset of the witness of p in G/Γ_n.
  int coset(int p, int n) const;
  // Symbol of the translate at position w: x(w·g).
  int symbol_at(int p, const Word& w) const;

 private:
  friend SampleSpace sample_space(std::shared_ptr<const ToeplitzSpec>, std::vector<Word>, int, const BallCaps&);

  std::shared_ptr<const ToeplitzSpec> spec_;
  std::vector<Word> window_;
  std::vector<Word> witness_;
  std::vector<int> state_;
  std::vector<std::vector<int>> pattern_;
  std::vector<int> point_of_state_;
  std::size_t distinct_ = 0;
  std::size_t provisional_ = 0;
  bool stable_ = false;
  int radius_ = 0;
};

SampleSpace sample_space(std::shared_ptr<const ToeplitzSpec> spec, std::vector<Word> window, int sample_radius,
                         const BallCaps& caps = default_caps().ball);

// Sorted point ids.
using SymbolicClopen = std::vector<int>;

SymbolicClopen clopen_union(const SymbolicClopen& a, const SymbolicClopen& b);
SymbolicClopen clopen_intersection(const SymbolicClopen& a, const SymbolicClopen& b);
SymbolicClopen clopen_complement(const SampleSpace& space, const SymbolicClopen& a);
SymbolicClopen clopen_translate(const SampleSpace& space, const Word& h, const SymbolicClopen& a);

using Partition = std::vector<SymbolicClopen>;

// Exact disjoint cover with nonempty cells.
bool is_partition(const SampleSpace& space, const Partition& p);
// Every cell of `fine` lies inside one cell of `coarse`.
bool refines(const SampleSpace& space, const Partition& fine, const Partition& coarse);

/// Tower partition {w.C_j : w in D, j}: base cells C_j over a transversal D
/// of the subgroup `level` of the spec's chain.
class LabeledPartition {
 public:
  LabeledPartition(const SampleSpace& space, int level, std::vector<SymbolicClopen> base, std::vector<Word> transversal);

  int level() const noexcept { return level_; }
  const std::vector<SymbolicClopen>& base() const noexcept { return base_; }
  const std::vector<Word>& transversal() const noexcept { return transversal_; }
  // cells()[i * k + j] = transversal[i] . base[j]
  const Partition& cells() const noexcept { return cells_; }
  SymbolicClopen base_union() const;

 private:
  int level_;
  std::vector<SymbolicClopen> base_;
  std::vector<Word> transversal_;
  Partition cells_;
};

// Returns γ·p ∉ C for some p ∈ C and γ ∈ Γ ∩ ball(radius) as (p, γ); empty when the law holds.
std::optional<std::pair<int, Word>> return_time_violation(const SampleSpace& space, const LabeledPartition& q,
                                                           int radius);

// Cells indexed by the coset [g] in G/Γ_n; one base cell (the coset of e).
LabeledPartition base_partition(const SampleSpace& space, int n);

LabeledPartition kr_refine(const SampleSpace& space, const Partition& r, const LabeledPartition& q);

// Partition by the pattern of x(w·g) over w in `window`.
Partition pattern_partition(const SampleSpace& space, const std::vector<Word>& window);
Partition trivial_partition(const SampleSpace& space);

// Symbol patterns on D_n, n = 0..N.
std::vector<Partition> default_refiners(const SampleSpace& space, int n_max);

struct TowerSequence {
  std::vector<LabeledPartition> levels;
  // property checks, all exact on the sample
  bool bases_nested = true;
  bool refinement_chain = true;
  bool return_times_ok = true;
};

TowerSequence kr_tower_sequence(const SampleSpace& space, const std::vector<Partition>& refiners, int n_max,
                                int test_radius = 4);

// Pairs of points with distinct window patterns that share a cell.
std::size_t unseparated_pairs(const SampleSpace& space, const Partition& p);

struct IncidenceMatrix {
  IntegerMatrix a;
  std::int64_t column_sum = 0;  // |D_{n+1}| / |D_n|
};

IncidenceMatrix incidence_matrix(const SampleSpace& space, const LabeledPartition& pn, const LabeledPartition& pn1);

// CSV of exact integers, one matrix per block.
std::string matrices_csv(const std::vector<IncidenceMatrix>& ms);

struct Interval {
  Rational lo, hi;
};

struct MeasureEstimate {
  // hulls[m]: coordinatewise hull of A_0...A_{m-1}(Δ_m) inside Δ_0
  std::vector<std::vector<Interval>> hulls;
  Rational diameter;
  bool uniquely_ergodic = false;
  double tolerance = 1e-9;
  // μ_M is the barycenter of Δ_M; μ_n = A_n μ_{n+1}
  std::vector<std::vector<Rational>> point;
  bool folner = false;
  std::string mode_label;
};

// d_sizes[n] = |D_n| for n = 0..M.
MeasureEstimate measure_estimate(const std::vector<IncidenceMatrix>& ms, const std::vector<std::int64_t>& d_sizes,
                                 GroupKind kind, double tolerance = 1e-9);

// |gD Δ D| / |D|
Rational folner_ratio(const std::vector<Word>& d, const Word& g);

}  // namespace odoforge
