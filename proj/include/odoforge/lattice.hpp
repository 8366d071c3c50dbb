#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace odoforge {

/// Dense exact integer matrix, row-major.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}
  static IntegerMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows, std::size_t cols);
  static IntegerMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::int64_t& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  std::vector<std::int64_t> row(std::size_t i) const;

  void swap_rows(std::size_t i, std::size_t j);
  void swap_cols(std::size_t i, std::size_t j);
  // row_i += k * row_j
  void add_row(std::size_t i, std::size_t j, std::int64_t k);
  void add_col(std::size_t i, std::size_t j, std::int64_t k);
  void negate_row(std::size_t i);
  void negate_col(std::size_t i);

  bool operator==(const IntegerMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::int64_t> a_;
};

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`:
/// upper triangular, positive pivots, entries above each pivot reduced into
/// [0, pivot). Zero rows are dropped.
IntegerMatrix hermite_normal_form(const IntegerMatrix& m);

/// U * M * V = D with U, V unimodular and D diagonal, d1 | d2 | ... .
struct SmithForm {
  IntegerMatrix d;
  IntegerMatrix u;
  IntegerMatrix v;
  std::vector<std::int64_t> diagonal;  // nonzero invariant factors
  std::size_t rank = 0;
};

SmithForm smith_normal_form(const IntegerMatrix& m);

}  // namespace odoforge
