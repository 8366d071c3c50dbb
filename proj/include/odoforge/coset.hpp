#pragma once

#include "odoforge/lattice.hpp"
#include "odoforge/word.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace odoforge {

/// Process-wide resource caps. Defaults can be overridden through the
/// ODOFORGE_CAPS environment variable, e.g. "max_states=20000,core_cap=5000".
struct Caps {
  std::size_t max_states = 10000;
  std::size_t core_cap = 1000000;
  BallCaps ball;
};

const Caps& default_caps();
// Parses "key=value,key=value"; unknown keys raise SemanticError.
Caps caps_from_string(std::string_view text, Caps base = Caps{});

/// Left action of the generators on a finite coset set. State 0 is eΓ.
class CosetTable {
 public:
  CosetTable(GroupPtr group, std::vector<std::vector<int>> perms);

  const GroupPtr& group() const noexcept { return group_; }
  int size() const noexcept { return size_; }
  const std::vector<std::vector<int>>& perms() const noexcept { return perms_; }

  int apply(Letter l, int state) const {
    const auto g = static_cast<std::size_t>((l < 0 ? -l : l) - 1);
    return l < 0 ? inverse_[g][state] : perms_[g][state];
  }
  // w . state, letters applied right to left.
  int act(const Word& w, int state) const;

 private:
  GroupPtr group_;
  int size_ = 0;
  std::vector<std::vector<int>> perms_;
  std::vector<std::vector<int>> inverse_;
};

/// Finite-index subgroup given by its complete coset table and a shortlex
/// Schreier transversal. States are numbered in shortlex order of their
/// transversal words, so state 0 always carries e.
class SubgroupHandle {
 public:
  // Renumbers `perms` canonically with `base` as the subgroup's own coset.
  static SubgroupHandle from_action(GroupPtr group, const std::vector<std::vector<int>>& perms,
                                    int base, std::string origin);

  const GroupPtr& group() const noexcept { return table_.group(); }
  const CosetTable& table() const noexcept { return table_; }
  int index() const noexcept { return table_.size(); }
  const std::vector<Word>& transversal() const noexcept { return transversal_; }
  const std::string& origin() const noexcept { return origin_; }

  int coset_of(const Word& w) const;
  bool contains(const Word& w) const { return coset_of(w) == 0; }

 private:
  SubgroupHandle(CosetTable table, std::vector<Word> transversal, std::string origin)
      : table_(std::move(table)), transversal_(std::move(transversal)), origin_(std::move(origin)) {}

  CosetTable table_;
  std::vector<Word> transversal_;
  std::string origin_;
};

SubgroupHandle whole_group(const GroupPtr& group);

SubgroupHandle subgroup_from_generators(const GroupPtr& group, const std::vector<Word>& gens,
                                        std::size_t max_states = default_caps().max_states);

// Stabilizer of `point` for a permutation action given per generator.
SubgroupHandle stabilizer_of_action(const GroupPtr& group,
                                    const std::vector<std::vector<int>>& perms, int point);

int coset_of(const SubgroupHandle& sub, const Word& w);

struct Containment {
  bool contained = false;
  std::optional<Word> witness;  // element of inner \ outer when not contained
};

Containment contains_subgroup(const SubgroupHandle& outer, const SubgroupHandle& inner);

SubgroupHandle intersect(const SubgroupHandle& h1, const SubgroupHandle& h2,
                         std::size_t max_states = default_caps().max_states);

SubgroupHandle normal_core(const SubgroupHandle& h, std::size_t cap = default_caps().core_cap);

// {w : g^-1 w g in h}
SubgroupHandle conjugate(const SubgroupHandle& h, const Word& g);

bool is_normal(const SubgroupHandle& h);

struct SchreierData {
  std::vector<Word> transversal;
  std::vector<Word> generators;  // nontrivial, deduplicated, shortlex-sorted
};

SchreierData schreier_data(const SubgroupHandle& h);

struct EigenLattice {
  IntegerMatrix lattice;                  // rows: abelianized Schreier generators
  std::vector<std::int64_t> snf;          // nonzero invariant factors d1 | d2 | ...
  std::vector<std::int64_t> torsion;      // invariant factors > 1
  std::size_t free_rank = 0;              // rank(G^ab) - rank(lattice)
  SmithForm smith;
  std::uint64_t quotient_order() const;   // product of torsion; meaningful when free_rank == 0
  std::string quotient_string() const;    // e.g. "Z/2 x Z/4"
};

EigenLattice eigen_lattice_snf(const SubgroupHandle& h);

}  // namespace odoforge
