#include "odoforge/lattice.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace odoforge {

IntegerMatrix IntegerMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows,
                                       std::size_t cols) {
  IntegerMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("ragged integer matrix");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
  IntegerMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::vector<std::int64_t> IntegerMatrix::row(std::size_t i) const {
  return {a_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

void IntegerMatrix::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
}

void IntegerMatrix::swap_cols(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
}

void IntegerMatrix::add_row(std::size_t i, std::size_t j, std::int64_t k) {
  if (k == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) += k * (*this)(j, c);
}

void IntegerMatrix::add_col(std::size_t i, std::size_t j, std::int64_t k) {
  if (k == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) += k * (*this)(r, j);
}

void IntegerMatrix::negate_row(std::size_t i) {
  for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
}

void IntegerMatrix::negate_col(std::size_t i) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, i) = -(*this)(r, i);
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("dimension mismatch in product");
  IntegerMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const auto x = a(i, k);
      if (x == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += x * b(k, j);
    }
  return c;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

IntegerMatrix hermite_normal_form(const IntegerMatrix& m) {
  IntegerMatrix h = m;
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < h.cols() && pivot_row < h.rows(); ++col) {
    // Euclid on column `col` among rows pivot_row..end.
    while (true) {
      std::size_t best = h.rows();
      for (std::size_t r = pivot_row; r < h.rows(); ++r) {
        if (h(r, col) == 0) continue;
        if (best == h.rows() || std::llabs(h(r, col)) < std::llabs(h(best, col))) best = r;
      }
      if (best == h.rows()) break;
      h.swap_rows(pivot_row, best);
      bool done = true;
      for (std::size_t r = pivot_row + 1; r < h.rows(); ++r) {
        if (h(r, col) == 0) continue;
        h.add_row(r, pivot_row, -(h(r, col) / h(pivot_row, col)));
        if (h(r, col) != 0) done = false;
      }
      if (done) break;
    }
    if (h(pivot_row, col) == 0) continue;
    if (h(pivot_row, col) < 0) h.negate_row(pivot_row);
    for (std::size_t r = 0; r < pivot_row; ++r)
      h.add_row(r, pivot_row, -floor_div(h(r, col), h(pivot_row, col)));
    ++pivot_row;
  }
  IntegerMatrix out(pivot_row, h.cols());
  for (std::size_t r = 0; r < pivot_row; ++r)
    for (std::size_t c = 0; c < h.cols(); ++c) out(r, c) = h(r, c);
  return out;
}

SmithForm smith_normal_form(const IntegerMatrix& m) {
  SmithForm s;
  s.d = m;
  s.u = IntegerMatrix::identity(m.rows());
  s.v = IntegerMatrix::identity(m.cols());
  auto& a = s.d;
  const std::size_t n = std::min(a.rows(), a.cols());

  auto row_op = [&](std::size_t i, std::size_t j, std::int64_t k) {
    a.add_row(i, j, k);
    s.u.add_row(i, j, k);
  };
  auto col_op = [&](std::size_t i, std::size_t j, std::int64_t k) {
    a.add_col(i, j, k);
    s.v.add_col(i, j, k);
  };
  auto swap_r = [&](std::size_t i, std::size_t j) {
    a.swap_rows(i, j);
    s.u.swap_rows(i, j);
  };
  auto swap_c = [&](std::size_t i, std::size_t j) {
    a.swap_cols(i, j);
    s.v.swap_cols(i, j);
  };

  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // Pivot: minimal nonzero absolute value in the trailing block.
      std::size_t pi = a.rows(), pj = a.cols();
      for (std::size_t i = t; i < a.rows(); ++i)
        for (std::size_t j = t; j < a.cols(); ++j)
          if (a(i, j) != 0 && (pi == a.rows() || std::llabs(a(i, j)) < std::llabs(a(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == a.rows()) {
        s.rank = t;
        goto finished;
      }
      swap_r(t, pi);
      swap_c(t, pj);
      const auto p = a(t, t);
      bool clean = true;
      for (std::size_t i = t + 1; i < a.rows(); ++i) {
        if (a(i, t) == 0) continue;
        row_op(i, t, -(a(i, t) / p));
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < a.cols(); ++j) {
        if (a(t, j) == 0) continue;
        col_op(j, t, -(a(t, j) / p));
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold an offending row into row t and retry.
      bool divides = true;
      for (std::size_t i = t + 1; i < a.rows() && divides; ++i)
        for (std::size_t j = t + 1; j < a.cols(); ++j)
          if (a(i, j) % p != 0) {
            row_op(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a(t, t) < 0) {
      a.negate_row(t);
      s.u.negate_row(t);
    }
    s.rank = t + 1;
  }
finished:
  for (std::size_t t = 0; t < s.rank; ++t) s.diagonal.push_back(a(t, t));
  return s;
}

}  // namespace odoforge
