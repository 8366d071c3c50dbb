#include "odoforge/word.hpp"

#include "odoforge/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <unordered_set>

namespace odoforge {

std::string_view to_string(GroupKind kind) {
  return kind == GroupKind::Free ? "free" : "free-abelian";
}

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

}  // namespace

std::shared_ptr<const GroupDescriptor> GroupDescriptor::make(GroupKind kind,
                                                             std::vector<std::string> names) {
  if (names.empty()) throw Error(ErrorKind::InvalidGroup, "rank must be at least 1");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!is_identifier(n) || n == "e")
      throw Error(ErrorKind::InvalidGroup, "bad generator name '" + n + "'");
    if (!seen.insert(n).second)
      throw Error(ErrorKind::InvalidGroup, "duplicate generator name '" + n + "'");
  }
  return std::shared_ptr<const GroupDescriptor>(new GroupDescriptor(kind, std::move(names)));
}

std::optional<int> GroupDescriptor::generator_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

bool same_group(const GroupPtr& a, const GroupPtr& b) {
  return a == b || (a && b && *a == *b);
}

void require_same_group(const GroupPtr& a, const GroupPtr& b) {
  if (!same_group(a, b)) throw Error(ErrorKind::GroupMismatch, "operands live in different groups");
}

Word::Word(GroupPtr group) : group_(std::move(group)) {
  if (group_->kind() == GroupKind::FreeAbelian) data_.assign(group_->rank(), 0);
}

Word Word::generator(GroupPtr group, int index, bool inverse) {
  Letter l = inverse ? -Letter(index + 1) : Letter(index + 1);
  return from_letters(std::move(group), std::span<const Letter>(&l, 1));
}

Word Word::from_letters(GroupPtr group, std::span<const Letter> letters) {
  Word w(std::move(group));
  const auto rank = w.group_->rank();
  for (Letter l : letters) {
    if (l == 0 || (l < 0 ? -l : l) > rank)
      throw Error(ErrorKind::UnknownGenerator, "letter out of range");
  }
  if (w.group_->kind() == GroupKind::FreeAbelian) {
    for (Letter l : letters) w.data_[(l < 0 ? -l : l) - 1] += (l < 0 ? -1 : 1);
    return w;
  }
  for (Letter l : letters) {
    if (!w.data_.empty() && w.data_.back() == -l)
      w.data_.pop_back();
    else
      w.data_.push_back(l);
  }
  return w;
}

Word Word::from_exponents(GroupPtr group, std::vector<std::int64_t> exponents) {
  if (group->kind() != GroupKind::FreeAbelian)
    throw Error(ErrorKind::GroupMismatch, "exponent vectors need a free-abelian group");
  if (static_cast<int>(exponents.size()) != group->rank())
    throw Error(ErrorKind::GroupMismatch, "exponent vector has the wrong rank");
  Word w(std::move(group));
  w.data_ = std::move(exponents);
  return w;
}

bool Word::is_identity() const {
  return std::all_of(data_.begin(), data_.end(), [](std::int64_t x) { return x == 0; });
}

std::vector<Letter> Word::letters() const {
  if (group_->kind() == GroupKind::Free) return data_;
  std::vector<Letter> out;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const Letter l = data_[i] < 0 ? -Letter(i + 1) : Letter(i + 1);
    for (std::int64_t k = 0; k < std::llabs(data_[i]); ++k) out.push_back(l);
  }
  return out;
}

std::size_t Word::length() const {
  if (group_->kind() == GroupKind::Free) return data_.size();
  std::size_t n = 0;
  for (auto x : data_) n += static_cast<std::size_t>(std::llabs(x));
  return n;
}

std::string Word::to_string() const {
  std::vector<std::pair<int, std::int64_t>> runs;  // (generator, exponent)
  if (group_->kind() == GroupKind::FreeAbelian) {
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (data_[i] != 0) runs.emplace_back(static_cast<int>(i), data_[i]);
  } else {
    for (Letter l : data_) {
      const int g = static_cast<int>((l < 0 ? -l : l) - 1);
      const std::int64_t s = l < 0 ? -1 : 1;
      if (!runs.empty() && runs.back().first == g && (runs.back().second < 0) == (s < 0))
        runs.back().second += s;
      else
        runs.emplace_back(g, s);
    }
  }
  if (runs.empty()) return "e";
  std::string out;
  for (const auto& [g, k] : runs) {
    if (!out.empty()) out += '*';
    out += group_->names()[g];
    if (k != 1) out += '^' + std::to_string(k);
  }
  return out;
}

bool shortlex_less(const Word& a, const Word& b) {
  const auto la = a.length(), lb = b.length();
  if (la != lb) return la < lb;
  if (a.group()->kind() == GroupKind::Free) {
    const auto& x = a.data();
    const auto& y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int sx = symbol_of(x[i]), sy = symbol_of(y[i]);
      if (sx != sy) return sx < sy;
    }
    return false;
  }
  const auto x = a.letters();
  const auto y = b.letters();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int sx = symbol_of(x[i]), sy = symbol_of(y[i]);
    if (sx != sy) return sx < sy;
  }
  return false;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto x : w.data()) {
    h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

Word multiply(const Word& a, const Word& b) {
  require_same_group(a.group(), b.group());
  if (a.group()->kind() == GroupKind::FreeAbelian) {
    auto v = a.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.data()[i];
    return Word::from_exponents(a.group(), std::move(v));
  }
  std::vector<Letter> all = a.data();
  all.insert(all.end(), b.data().begin(), b.data().end());
  return Word::from_letters(a.group(), all);
}

Word invert(const Word& w) {
  if (w.group()->kind() == GroupKind::FreeAbelian) {
    auto v = w.data();
    for (auto& x : v) x = -x;
    return Word::from_exponents(w.group(), std::move(v));
  }
  std::vector<Letter> rev(w.data().rbegin(), w.data().rend());
  for (auto& l : rev) l = -l;
  return Word::from_letters(w.group(), rev);
}

Word reduce(const GroupPtr& group, std::span<const Letter> letters) {
  return Word::from_letters(group, letters);
}

Word word_arith(WordOp op, const Word& w1, const std::optional<Word>& w2) {
  switch (op) {
    case WordOp::Multiply:
      if (!w2) throw Error(ErrorKind::GroupMismatch, "multiply needs two operands");
      return multiply(w1, *w2);
    case WordOp::Invert:
      return invert(w1);
    case WordOp::Reduce:
      return reduce(w1.group(), w1.letters());
  }
  return w1;
}

Word parse_word(std::string_view text, const GroupPtr& group) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto syntax = [&](const std::string& msg) {
    return Error(ErrorKind::SyntaxError, "at position " + std::to_string(pos) + ": " + msg);
  };

  std::vector<Letter> letters;
  skip_ws();
  if (pos == text.size()) throw syntax("empty word");
  while (true) {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (start == pos) throw syntax("expected generator name");
    const std::string_view name = text.substr(start, pos - start);
    if (!is_identifier(name)) {
      pos = start;
      throw syntax("expected generator name");
    }
    skip_ws();
    std::int64_t exponent = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      skip_ws();
      std::size_t num_start = pos;
      if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      std::string_view digits = text.substr(num_start, pos - num_start);
      if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), exponent);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
        pos = num_start;
        throw syntax("expected integer exponent");
      }
      if (std::llabs(exponent) > 1'000'000) throw syntax("exponent too large");
    }
    if (name == "e") {
      // identity contributes nothing, whatever its exponent
    } else {
      auto idx = group->generator_index(name);
      if (!idx) throw Error(ErrorKind::UnknownGenerator, std::string(name));
      const Letter l = exponent < 0 ? -Letter(*idx + 1) : Letter(*idx + 1);
      for (std::int64_t k = 0; k < std::llabs(exponent); ++k) letters.push_back(l);
    }
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != '*') throw syntax("expected '*'");
    ++pos;
  }
  return Word::from_letters(group, letters);
}

std::vector<std::int64_t> abelianize(const Word& w) {
  if (w.group()->kind() == GroupKind::FreeAbelian) return w.data();
  std::vector<std::int64_t> v(w.group()->rank(), 0);
  for (Letter l : w.data()) v[(l < 0 ? -l : l) - 1] += (l < 0 ? -1 : 1);
  return v;
}

namespace {

void check_radius(const GroupPtr& group, int radius, const BallCaps& caps) {
  if (radius < 0) throw Error(ErrorKind::RadiusCap, "negative radius");
  const int cap = group->kind() == GroupKind::Free ? caps.free_radius : caps.abelian_radius;
  if (radius > cap)
    throw Error(ErrorKind::RadiusCap,
                "radius " + std::to_string(radius) + " exceeds cap " + std::to_string(cap));
}

// Exponent vectors with L1 norm exactly r over `rank` coordinates.
void abelian_sphere(int rank, int r, std::vector<std::int64_t>& cur, int i,
                    std::vector<std::vector<std::int64_t>>& out) {
  if (i == rank - 1) {
    cur[i] = r;
    out.push_back(cur);
    if (r != 0) {
      cur[i] = -r;
      out.push_back(cur);
    }
    cur[i] = 0;
    return;
  }
  for (int k = 0; k <= r; ++k) {
    cur[i] = k;
    abelian_sphere(rank, r - k, cur, i + 1, out);
    if (k != 0) {
      cur[i] = -k;
      abelian_sphere(rank, r - k, cur, i + 1, out);
    }
  }
  cur[i] = 0;
}

}  // namespace

std::vector<Word> sphere_enumerate(const GroupPtr& group, int radius, const BallCaps& caps) {
  check_radius(group, radius, caps);
  std::vector<Word> out;
  if (group->kind() == GroupKind::FreeAbelian) {
    std::vector<std::vector<std::int64_t>> vecs;
    std::vector<std::int64_t> cur(group->rank(), 0);
    abelian_sphere(group->rank(), radius, cur, 0, vecs);
    out.reserve(vecs.size());
    for (auto& v : vecs) out.push_back(Word::from_exponents(group, std::move(v)));
    std::sort(out.begin(), out.end(), ShortlexLess{});
    return out;
  }
  // Appending symbols in order to a lex-sorted sphere keeps it lex-sorted.
  std::vector<std::vector<Letter>> layer{{}};
  const int nsym = 2 * group->rank();
  for (int r = 0; r < radius; ++r) {
    std::vector<std::vector<Letter>> next;
    for (const auto& w : layer) {
      for (int s = 0; s < nsym; ++s) {
        const Letter l = letter_of_symbol(s);
        if (!w.empty() && w.back() == -l) continue;
        auto v = w;
        v.push_back(l);
        next.push_back(std::move(v));
      }
    }
    layer = std::move(next);
  }
  out.reserve(layer.size());
  for (const auto& w : layer) out.push_back(Word::from_letters(group, w));
  return out;
}

std::vector<Word> ball_enumerate(const GroupPtr& group, int radius, const BallCaps& caps) {
  check_radius(group, radius, caps);
  std::vector<Word> out;
  for (int r = 0; r <= radius; ++r) {
    auto s = sphere_enumerate(group, r, caps);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

}  // namespace odoforge
