#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odoforge {

enum class GroupKind { Free, FreeAbelian };

std::string_view to_string(GroupKind kind);

/// A finitely generated free or free-abelian group, identified by its kind and
/// generator names. Names are identifiers ([A-Za-z_][A-Za-z0-9_]*) other than
/// the reserved identity symbol `e`.
class GroupDescriptor {
 public:
  static std::shared_ptr<const GroupDescriptor> make(GroupKind kind,
                                                     std::vector<std::string> names);

  GroupKind kind() const noexcept { return kind_; }
  int rank() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<int> generator_index(std::string_view name) const;

  bool operator==(const GroupDescriptor& other) const {
    return kind_ == other.kind_ && names_ == other.names_;
  }

 private:
  GroupDescriptor(GroupKind kind, std::vector<std::string> names)
      : kind_(kind), names_(std::move(names)) {}

  GroupKind kind_;
  std::vector<std::string> names_;
};

using GroupPtr = std::shared_ptr<const GroupDescriptor>;

bool same_group(const GroupPtr& a, const GroupPtr& b);
void require_same_group(const GroupPtr& a, const GroupPtr& b);

// Letters are encoded as +(i+1) for generator i and -(i+1) for its inverse.
using Letter = std::int64_t;

inline int symbol_of(Letter l) {
  return 2 * static_cast<int>((l < 0 ? -l : l) - 1) + (l < 0 ? 1 : 0);
}
inline Letter letter_of_symbol(int sym) {
  return (sym % 2 == 0) ? Letter(sym / 2 + 1) : -Letter(sym / 2 + 1);
}

/// Reduced group element. Free words store a freely reduced letter sequence;
/// free-abelian words store the exponent vector.
class Word {
 public:
  explicit Word(GroupPtr group);

  static Word identity(GroupPtr group) { return Word(std::move(group)); }
  static Word generator(GroupPtr group, int index, bool inverse = false);
  static Word from_letters(GroupPtr group, std::span<const Letter> letters);
  static Word from_exponents(GroupPtr group, std::vector<std::int64_t> exponents);

  const GroupPtr& group() const noexcept { return group_; }
  bool is_identity() const;

  // Letter sequence of the canonical spelling. For abelian words this is
  // a1^e1 a2^e2 ... in generator order.
  std::vector<Letter> letters() const;
  // Raw storage: letters for free words, exponents for abelian ones.
  const std::vector<std::int64_t>& data() const noexcept { return data_; }
  std::size_t length() const;

  std::string to_string() const;

  bool operator==(const Word& other) const { return data_ == other.data_; }
  bool operator!=(const Word& other) const { return !(*this == other); }

 private:
  GroupPtr group_;
  std::vector<std::int64_t> data_;
};

/// Shortlex order on the symbols a1 < a1^-1 < a2 < a2^-1 < ...
bool shortlex_less(const Word& a, const Word& b);

struct ShortlexLess {
  bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept;
};

Word multiply(const Word& a, const Word& b);
Word invert(const Word& w);
// Product of an arbitrary (not necessarily reduced) letter sequence.
Word reduce(const GroupPtr& group, std::span<const Letter> letters);

enum class WordOp { Multiply, Invert, Reduce };
Word word_arith(WordOp op, const Word& w1, const std::optional<Word>& w2 = std::nullopt);

inline Word operator*(const Word& a, const Word& b) { return multiply(a, b); }

/// Parses `term ('*' term)*` with term = name ('^' signed-int)?, or `e`.
Word parse_word(std::string_view text, const GroupPtr& group);

/// Exponent-sum vector in Z^rank.
std::vector<std::int64_t> abelianize(const Word& w);

struct BallCaps {
  int free_radius = 12;
  int abelian_radius = 50;
};

/// All reduced words of length <= radius, strictly increasing in shortlex.
std::vector<Word> ball_enumerate(const GroupPtr& group, int radius,
                                 const BallCaps& caps = BallCaps{});

/// Words of length exactly `radius`, shortlex-sorted.
std::vector<Word> sphere_enumerate(const GroupPtr& group, int radius,
                                   const BallCaps& caps = BallCaps{});

}  // namespace odoforge
