#pragma once

// Sparse multivariate polynomials with exact rational coefficients.

#include "cylharm/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cylharm {

/// Exponent vector (one entry per variable x_1..x_n).
using MultiIndex = std::vector<unsigned>;

inline unsigned total_degree(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0u);
}

/// Graded lexicographic order: lower total degree first; within a degree,
/// larger x_1 exponent first, then larger x_2, and so on (x1^2 < x1*x2 < x2^2).
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, Rational, GradedLex>;

  explicit Polynomial(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("polynomial dimension must be positive");
  }

  static Polynomial constant(std::size_t dim, const Rational& c) {
    Polynomial p(dim);
    p.add_term(MultiIndex(dim, 0), c);
    return p;
  }

  /// x_{index+1}, zero-based index.
  static Polynomial variable(std::size_t dim, std::size_t index) {
    MultiIndex alpha(dim, 0);
    alpha.at(index) = 1;
    return monomial(std::move(alpha), Rational(1));
  }

  static Polynomial monomial(MultiIndex alpha, const Rational& c) {
    Polynomial p(alpha.size());
    p.add_term(std::move(alpha), c);
    return p;
  }

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// nullopt stands for the degree of the zero polynomial.
  std::optional<unsigned> degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.rbegin()->first);
  }

  Rational coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Adds c·x^alpha, dropping the entry if the coefficient cancels.
  void add_term(MultiIndex alpha, const Rational& c) {
    if (alpha.size() != dim_) throw DimensionMismatch(dim_, alpha.size());
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(alpha), c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Polynomial homogeneous_part(unsigned k) const {
    Polynomial out(dim_);
    for (const auto& [alpha, c] : terms_)
      if (total_degree(alpha) == k) out.terms_.emplace_hint(out.terms_.end(), alpha, c);
    return out;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    return total_degree(terms_.begin()->first) == total_degree(terms_.rbegin()->first);
  }

  Polynomial& operator+=(const Polynomial& other) {
    check_dim(other);
    for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& other) {
    check_dim(other);
    for (const auto& [alpha, c] : other.terms_) add_term(alpha, -c);
    return *this;
  }

  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [alpha, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial out(a.dim_);
    MultiIndex gamma(a.dim_);
    for (const auto& [alpha, ca] : a.terms_) {
      for (const auto& [beta, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.dim_; ++i) gamma[i] = alpha[i] + beta[i];
        out.add_term(gamma, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

 private:
  void check_dim(const Polynomial& other) const {
    if (other.dim_ != dim_) throw DimensionMismatch(dim_, other.dim_);
  }

  std::size_t dim_;
  TermMap terms_;
};

/// d/dx_{var+1}
inline Polynomial partial_derivative(const Polynomial& f, std::size_t var) {
  Polynomial out(f.dim());
  for (const auto& [alpha, c] : f.terms()) {
    if (alpha[var] == 0) continue;
    MultiIndex beta = alpha;
    beta[var] -= 1;
    out.add_term(std::move(beta), c * alpha[var]);
  }
  return out;
}

/// Δf = Σ_j ∂²f/∂x_j², computed termwise.
inline Polynomial laplacian(const Polynomial& f) {
  Polynomial out(f.dim());
  for (const auto& [alpha, c] : f.terms()) {
    for (std::size_t j = 0; j < f.dim(); ++j) {
      if (alpha[j] < 2) continue;
      MultiIndex beta = alpha;
      beta[j] -= 2;
      out.add_term(std::move(beta), c * (alpha[j] * (alpha[j] - 1)));
    }
  }
  return out;
}

/// Components indexed by degree; entry m is homogeneous of degree m (possibly zero).
struct HomogeneousDecomposition {
  std::size_t dim = 0;
  std::vector<Polynomial> components;

  Polynomial recompose() const {
    Polynomial sum(dim);
    for (const auto& c : components) sum += c;
    return sum;
  }
};

inline HomogeneousDecomposition homogeneous_decompose(const Polynomial& f) {
  HomogeneousDecomposition out{f.dim(), {}};
  const auto deg = f.degree();
  if (!deg) return out;
  out.components.assign(*deg + 1, Polynomial(f.dim()));
  for (const auto& [alpha, c] : f.terms()) out.components[total_degree(alpha)].add_term(alpha, c);
  return out;
}

/// Exact evaluation at a rational point.
inline Rational evaluate(const Polynomial& f, std::span<const Rational> point) {
  if (point.size() != f.dim()) throw DimensionMismatch(f.dim(), point.size());
  Rational sum(0);
  for (const auto& [alpha, c] : f.terms()) {
    Rational term = c;
    for (std::size_t i = 0; i < alpha.size(); ++i)
      if (alpha[i] > 0) term *= pow(point[i], alpha[i]);
    sum += term;
  }
  return sum;
}

/// Floating-point evaluation; each monomial uses repeated squaring per variable.
inline double evaluate(const Polynomial& f, std::span<const double> point) {
  if (point.size() != f.dim()) throw DimensionMismatch(f.dim(), point.size());
  double sum = 0.0;
  for (const auto& [alpha, c] : f.terms()) {
    double term = to_double(c);
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (unsigned e = 0; e < alpha[i]; ++e) term *= point[i];
    sum += term;
  }
  return sum;
}

/// Largest |coefficient|; zero for the zero polynomial.
inline Rational max_abs_coefficient(const Polynomial& f) {
  Rational best(0);
  for (const auto& [alpha, c] : f.terms()) {
    Rational a = abs(c);
    if (a > best) best = a;
  }
  return best;
}

/// All monomials of total degree k in n variables, in GradedLex order.
inline std::vector<MultiIndex> homogeneous_basis(std::size_t n, unsigned k) {
  std::vector<MultiIndex> out;
  MultiIndex alpha(n, 0);
  // Enumerate exponents of x_1 descending, recursively; yields GradedLex order.
  auto rec = [&](auto&& self, std::size_t var, unsigned remaining) -> void {
    if (var + 1 == n) {
      alpha[var] = remaining;
      out.push_back(alpha);
      return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
      alpha[var] = e;
      self(self, var + 1, remaining - e);
    }
  };
  rec(rec, 0, k);
  return out;
}

/// Monomial basis of P_m: degrees 0..m, GradedLex order.
inline std::vector<MultiIndex> graded_basis(std::size_t n, unsigned m) {
  std::vector<MultiIndex> out;
  for (unsigned k = 0; k <= m; ++k) {
    auto block = homogeneous_basis(n, k);
    out.insert(out.end(), std::make_move_iterator(block.begin()), std::make_move_iterator(block.end()));
  }
  return out;
}

/// dim P_m = binomial(n + m, n).
inline std::size_t graded_basis_size(std::size_t n, unsigned m) {
  return binomial(static_cast<unsigned>(n + m), static_cast<unsigned>(n)).get_ui();
}

}  // namespace cylharm
