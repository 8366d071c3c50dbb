#pragma once

#include "odoforge/chain.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace odoforge {

struct FundamentalDomainTower {
  std::vector<std::vector<Word>> d;  // D_0..D_N
  std::vector<std::vector<Word>> k;  // K_0..K_{N-1}
};

struct MarkerData {
  std::vector<std::vector<Word>> s;  // S_0..S_N
  std::vector<Word> v;               // v_0 = e, v_1..v_N
};

enum class ToeplitzMode { Generic, Finite };

struct ToeplitzValue {
  int symbol = 1;
  bool exact = false;
  std::optional<int> level;

  bool operator==(const ToeplitzValue&) const = default;
};

/// The {0,1} array built from a chain: zero on S_0Γ_1 ∪ S_2Γ_3 ∪ ..., one
/// elsewhere. Values are resolved through the top level's coset table, since
/// everything decidable at depth N is right-Γ_N-invariant.
class ToeplitzSpec {
 public:
  // `search` bounds the ball used to find the K_n.
  static ToeplitzSpec build(const Chain& chain, int depth, const BallCaps& search = default_caps().ball);

  const Chain& chain() const noexcept { return *chain_; }
  const GroupPtr& group() const noexcept { return chain_->group(); }
  int depth() const noexcept { return chain_->depth(); }
  ToeplitzMode mode() const noexcept { return mode_; }
  // Finite mode: the level m with Γ_m = Γ_{m+1} = ... = Γ_N.
  std::optional<int> stabilization_level() const noexcept { return stable_; }

  const FundamentalDomainTower& tower() const noexcept { return tower_; }
  const MarkerData& markers() const noexcept { return markers_; }

  // Level whose cosets carry the array (N, or m in finite mode).
  int top_level() const noexcept { return stable_ ? *stable_ : depth(); }
  const SubgroupHandle& top() const { return chain_->level(top_level()); }

  ToeplitzValue evaluate(const Word& w) const { return by_state_[static_cast<std::size_t>(top().coset_of(w))]; }
  const ToeplitzValue& evaluate_state(int state) const { return by_state_[static_cast<std::size_t>(state)]; }

  // σ with wΓ_n ⊆ x^-1(σ) provable from the construction, if any.
  std::optional<int> certify(const Word& w, int n) const;

  bool in_tower(const Word& w) const { return top_domain_.count(w) > 0; }

 private:
  ToeplitzValue evaluate_coords(const std::vector<int>& coords) const;

  std::shared_ptr<const Chain> chain_;
  ToeplitzMode mode_ = ToeplitzMode::Generic;
  std::optional<int> stable_;
  FundamentalDomainTower tower_;
  MarkerData markers_;
  std::vector<std::vector<char>> hit_;  // hit_[m][state of Γ_{m+1}]: state ⊆ S_mΓ_{m+1}
  std::vector<int> marker_state_;       // coset of v_m in G/Γ_m
  std::vector<ToeplitzValue> by_state_;
  std::unordered_map<Word, int, WordHash> top_domain_;
};

// Tower plus markers; equivalent to ToeplitzSpec::build.
ToeplitzSpec build_tower_and_markers(const Chain& chain, int depth, const BallCaps& search = default_caps().ball);

ToeplitzValue evaluate(const ToeplitzSpec& spec, const Word& w);

// `<word> <symbol> <exact|provisional> <level|->` per window element.
std::string dump_array(const ToeplitzSpec& spec, const std::vector<Word>& window);

struct PerReport {
  int level = 0;
  std::vector<Word> certified[2];
  std::vector<Word> residue;
  std::size_t sampled_checks = 0;
  std::vector<Word> contradictions;  // certified positions failing the sampled test
};

// Throws WindowOutsideTower unless window ⊆ D_N.
PerReport per_report(const ToeplitzSpec& spec, int n, const std::vector<Word>& window, int test_radius);

struct VerifyEntry {
  Word position;
  int symbol = 0;
  std::optional<int> level;  // least certified (or sampled) level
};

struct VerifyReport {
  bool pass = false;
  bool sampled_only = false;  // external array: nothing is certified
  std::vector<VerifyEntry> entries;
  std::vector<Word> uncertified;
  std::size_t sampled_checks = 0;
  std::vector<Word> contradictions;
  // Regular recurrence: Γ_level returns x to its cylinder over the window.
  std::optional<int> recurrence_level;
  bool recurrence_confirmed = false;
};

VerifyReport toeplitz_verify(const ToeplitzSpec& spec, const std::vector<Word>& window, int radius);

struct Falsification {
  enum class Outcome { Witness, Inconclusive, InGroup };
  Outcome outcome = Outcome::Inconclusive;
  std::optional<Word> w;
  int sigma = 0;
  std::optional<Word> gamma;  // x(w·gamma·g) != sigma, exactly
};

std::string_view to_string(Falsification::Outcome o);

// w ranges over ball(depth) in shortlex order; γ over all of Γ_n through the
// orbit of Γ_n's Schreier generators on the top coset table.
Falsification essential_falsify(const ToeplitzSpec& spec, int n, const Word& g, int depth);

struct PeriodEntry {
  int level;
  Word g;
  Falsification result;
};

struct PeriodReport {
  int levels = 0;
  int radius = 0;
  std::size_t witnesses = 0;
  std::size_t inconclusive = 0;
  std::vector<PeriodEntry> entries;  // non-members of Γ_n only
  bool certificate = false;          // no inconclusive entries and verify passed
};

PeriodReport period_structure_check(const ToeplitzSpec& spec, int levels, int radius, bool verify_pass,
                                    std::optional<int> depth = std::nullopt);

TruncatedPoint factor_coords(const ToeplitzSpec& spec, const Word& g, int n);

struct OrbitPattern {
  Word witness;
  std::vector<int> pattern;
};

struct OrbitPatterns {
  std::vector<OrbitPattern> patterns;  // first-seen order over the shortlex ball
  std::size_t dropped = 0;             // translates hitting provisional values
};

// (g.x)(w) = x(w·g) for g in ball(sample_radius), deduplicated by pattern.
OrbitPatterns orbit_patterns(const ToeplitzSpec& spec, const std::vector<Word>& window, int sample_radius,
                             const BallCaps& caps = default_caps().ball);

/// Array read from a pattern file; only sampled periodicity is ever claimed.
struct ExternalArray {
  GroupPtr group;
  std::unordered_map<Word, int, WordHash> values;
};

// Lines `<word> <symbol> [...]`; `#` starts a comment.
ExternalArray parse_pattern_file(std::string_view text, const GroupPtr& group);

VerifyReport verify_external(const Chain& chain, const ExternalArray& array, const std::vector<Word>& window,
                             int radius);

}  // namespace odoforge
