#pragma once

// Dense exact linear algebra over Q.

#include "cylharm/rational.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cylharm {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Determinant by fraction-free (Bareiss) elimination. Rational entries are first
/// scaled to integers by the lcm of all denominators; det(A) = det(D·A) / D^n.
inline Rational bareiss_determinant(const RationalMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return Rational(1);
  Integer lcm_den = 1;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), a(r, c).get_den_mpz_t());
  std::vector<Integer> m(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m[r * n + c] = a(r, c).get_num() * (lcm_den / a(r, c).get_den());

  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row * n + k] == 0) ++swap_row;
      if (swap_row == n) return Rational(0);
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[swap_row * n + c]);
      sign = -sign;
    }
    const Integer& pivot = m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer& target = m[i * n + j];
        target = pivot * target - m[i * n + k] * m[k * n + j];
        mpz_divexact(target.get_mpz_t(), target.get_mpz_t(), prev.get_mpz_t());
      }
      m[i * n + k] = 0;
    }
    prev = pivot;
  }
  Integer det_scaled = m[n * n - 1];
  if (sign < 0) det_scaled = -det_scaled;
  Integer scale;
  mpz_pow_ui(scale.get_mpz_t(), lcm_den.get_mpz_t(), n);
  Rational det(det_scaled, scale);
  det.canonicalize();
  return det;
}

class SingularMatrix : public std::runtime_error {
 public:
  explicit SingularMatrix(std::size_t column)
      : std::runtime_error("singular matrix (no pivot in column " + std::to_string(column) + ")"), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Exact PLU factorization; the pivot is the first nonzero entry at or below the
/// diagonal, so the factorization is deterministic. Factor once, solve many times.
class ExactLU {
 public:
  explicit ExactLU(RationalMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LU of a non-square matrix");
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    Rational factor;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      while (p < n && lu_(p, k) == 0) ++p;
      if (p == n) throw SingularMatrix(k);
      if (p != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
        std::swap(perm_[k], perm_[p]);
      }
      const Rational inv_pivot = 1 / lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        if (lu_(i, k) == 0) continue;
        factor = lu_(i, k) * inv_pivot;
        lu_(i, k) = factor;
        for (std::size_t j = k + 1; j < n; ++j)
          if (lu_(k, j) != 0) lu_(i, j) -= factor * lu_(k, j);
      }
    }
  }

  std::size_t size() const { return lu_.rows(); }

  std::vector<Rational> solve(const std::vector<Rational>& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw std::invalid_argument("right-hand side has wrong length");
    std::vector<Rational> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j)
        if (lu_(i, j) != 0 && y[j] != 0) y[i] -= lu_(i, j) * y[j];
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j)
        if (lu_(i, j) != 0 && y[j] != 0) y[i] -= lu_(i, j) * y[j];
      y[i] /= lu_(i, i);
    }
    return y;
  }

 private:
  RationalMatrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace cylharm
