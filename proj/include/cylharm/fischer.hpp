#pragma once

// The Fischer operator F(q) = Δ(p·q) on P_m and the polynomial Dirichlet solver
// u = f − p·F⁻¹(Δf) for ellipsoidal cylinders and ellipsoids.
//
// With p = p₂ − 1 and q = Σ_k q_k (q_k ∈ H_k), the degree-k part of F(q) is
//   Δ(p₂ q_k) − Δ q_{k+2},
// so F is block upper-triangular with respect to the grading. The diagonal blocks
// L_k = Δ(p₂ ·)|_{H_k} are further block-diagonal by exponent parity, since p₂ is
// even in every variable. Solving runs from the top degree down.

#include "cylharm/domain.hpp"
#include "cylharm/exact_linalg.hpp"
#include "cylharm/polynomial.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cylharm {

/// Δ(p·q) computed by expansion.
inline Polynomial fischer_apply(const DomainSpec& domain, const Polynomial& q) {
  if (q.dim() != domain.dim) throw DimensionMismatch(domain.dim, q.dim());
  return laplacian(defining_polynomial(domain) * q);
}

class BasisOverflow : public std::length_error {
 public:
  BasisOverflow(std::size_t size, std::size_t cap)
      : std::length_error("basis size " + std::to_string(size) + " exceeds cap " + std::to_string(cap)) {}
};

/// Violation of bijectivity of the Fischer operator. Never expected for a valid domain.
class SingularFischerBlock : public std::logic_error {
 public:
  SingularFischerBlock(unsigned degree, std::uint64_t parity)
      : std::logic_error("singular homogeneous Fischer block at degree " + std::to_string(degree) +
                         " (parity class " + std::to_string(parity) + ")"),
        degree_(degree) {}
  unsigned degree() const { return degree_; }

 private:
  unsigned degree_;
};

struct FischerMatrix {
  DomainSpec domain;
  unsigned m = 0;
  std::vector<MultiIndex> basis;
  // Sparse columns: (row index, value), rows ascending.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> columns;

  std::size_t size() const { return basis.size(); }

  Rational entry(std::size_t row, std::size_t col) const {
    for (const auto& [r, v] : columns.at(col))
      if (r == row) return v;
    return Rational(0);
  }

  RationalMatrix dense() const {
    RationalMatrix out(size(), size());
    for (std::size_t c = 0; c < size(); ++c)
      for (const auto& [r, v] : columns[c]) out(r, c) = v;
    return out;
  }

  /// Nonzero entries only map degree k to degree k or k−2, and the k→k block equals Δ(p₂ ·).
  bool has_graded_block_structure() const {
    const Polynomial p2 = leading_quadratic(domain);
    for (std::size_t c = 0; c < size(); ++c) {
      const unsigned kin = total_degree(basis[c]);
      const Polynomial top = laplacian(p2 * Polynomial::monomial(basis[c], Rational(1)));
      for (const auto& [r, v] : columns[c]) {
        const unsigned kout = total_degree(basis[r]);
        if (kout == kin) {
          if (top.coefficient(basis[r]) != v) return false;
        } else if (kout + 2 != kin) {
          return false;
        }
      }
      for (const auto& [alpha, v] : top.terms()) {
        bool found = false;
        for (const auto& [r, w] : columns[c]) found = found || (basis[r] == alpha && w == v);
        if (!found) return false;
      }
    }
    return true;
  }
};

/// Exact matrix of F on the graded-lex monomial basis of P_m.
inline FischerMatrix fischer_matrix(const DomainSpec& domain, unsigned m, std::size_t cap = 200000) {
  domain.validate();
  const std::size_t size = graded_basis_size(domain.dim, m);
  if (size > cap) throw BasisOverflow(size, cap);
  FischerMatrix out{domain, m, graded_basis(domain.dim, m), {}};
  std::map<MultiIndex, std::size_t, GradedLex> index;
  for (std::size_t i = 0; i < out.basis.size(); ++i) index.emplace(out.basis[i], i);
  const Polynomial p = defining_polynomial(domain);
  out.columns.resize(size);
  for (std::size_t c = 0; c < size; ++c) {
    const Polynomial image = laplacian(p * Polynomial::monomial(out.basis[c], Rational(1)));
    for (const auto& [alpha, v] : image.terms()) out.columns[c].emplace_back(index.at(alpha), v);
  }
  return out;
}

/// Parity class of a monomial: bit i set iff the exponent of x_{i+1} is odd.
inline std::uint64_t parity_mask(const MultiIndex& alpha) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] & 1u) mask |= (std::uint64_t{1} << i);
  return mask;
}

/// One parity class of the homogeneous block L_k = Δ(p₂ ·) on H_k.
struct HomogeneousBlock {
  unsigned degree = 0;
  std::uint64_t parity = 0;
  std::vector<MultiIndex> basis;
  std::map<MultiIndex, std::size_t, GradedLex> index;
  RationalMatrix matrix;
};

/// Parity classes occurring in H_k, ascending.
inline std::vector<std::uint64_t> parity_classes(std::size_t n, unsigned k) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto odd = static_cast<unsigned>(std::popcount(mask));
    if (odd <= k && (k - odd) % 2 == 0) out.push_back(mask);
  }
  return out;
}

inline HomogeneousBlock homogeneous_block(const DomainSpec& domain, unsigned k, std::uint64_t parity) {
  HomogeneousBlock block;
  block.degree = k;
  block.parity = parity;
  for (auto& alpha : homogeneous_basis(domain.dim, k))
    if (parity_mask(alpha) == parity) block.basis.push_back(std::move(alpha));
  for (std::size_t i = 0; i < block.basis.size(); ++i) block.index.emplace(block.basis[i], i);
  block.matrix = RationalMatrix(block.basis.size(), block.basis.size());
  const Polynomial p2 = leading_quadratic(domain);
  for (std::size_t c = 0; c < block.basis.size(); ++c) {
    const Polynomial image = laplacian(p2 * Polynomial::monomial(block.basis[c], Rational(1)));
    for (const auto& [alpha, v] : image.terms()) block.matrix(block.index.at(alpha), c) = v;
  }
  return block;
}

/// Determinants of every parity block of L_k; the block is nonsingular iff all are nonzero.
inline std::vector<Rational> homogeneous_block_determinants(const DomainSpec& domain, unsigned k) {
  std::vector<Rational> out;
  for (auto parity : parity_classes(domain.dim, k))
    out.push_back(bareiss_determinant(homogeneous_block(domain, k, parity).matrix));
  return out;
}

/// Exact witness that u solves the Dirichlet problem with data f.
struct DirichletCertificate {
  Polynomial residual_laplacian;  // Δu, must be zero
  Polynomial boundary_quotient;   // (u − f) = p · boundary_quotient
  unsigned degree = 0;            // deg f (0 for zero data)
  std::size_t basis_size = 0;     // dim P_{deg Δf}, size of the operator actually inverted

  bool holds(const DomainSpec& domain, const Polynomial& f, const Polynomial& u) const {
    return residual_laplacian.is_zero() && laplacian(u).is_zero() &&
           defining_polynomial(domain) * boundary_quotient + f == u;
  }
};

struct DirichletSolution {
  Polynomial u;
  DirichletCertificate certificate;
};

/// Quotient and remainder of g by p, reducing in x₁² (p = x₁²/a₁² + ...).
/// The remainder has x₁-degree ≤ 1 and is zero iff p divides g.
inline std::pair<Polynomial, Polynomial> divide_by_defining(const DomainSpec& domain, Polynomial g) {
  const Polynomial p = defining_polynomial(domain);
  const Rational lead_inv = domain.axes_squared[0];  // 1 / (1/a₁²)
  Polynomial quotient(domain.dim);
  while (true) {
    // Highest-x₁-exponent term with exponent ≥ 2.
    const MultiIndex* pick = nullptr;
    for (const auto& [alpha, c] : g.terms())
      if (alpha[0] >= 2 && (!pick || alpha[0] > (*pick)[0])) pick = &alpha;
    if (!pick) break;
    MultiIndex beta = *pick;
    const Rational coeff = g.coefficient(beta) * lead_inv;
    beta[0] -= 2;
    Polynomial step = Polynomial::monomial(std::move(beta), coeff);
    g -= p * step;
    quotient += step;
  }
  return {std::move(quotient), std::move(g)};
}

enum class VerifyStatus { ok, not_harmonic, boundary_mismatch };

inline const char* to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::ok: return "ok";
    case VerifyStatus::not_harmonic: return "not harmonic";
    case VerifyStatus::boundary_mismatch: return "boundary mismatch";
  }
  return "?";
}

struct Verification {
  VerifyStatus status = VerifyStatus::ok;
  std::optional<DirichletCertificate> certificate;  // set iff status == ok
  std::optional<Polynomial> witness;                // Δu or the division remainder on failure
};

inline Verification verify_solution(const DomainSpec& domain, const Polynomial& f, const Polynomial& u) {
  if (f.dim() != domain.dim) throw DimensionMismatch(domain.dim, f.dim());
  if (u.dim() != domain.dim) throw DimensionMismatch(domain.dim, u.dim());
  Verification out;
  Polynomial residual = laplacian(u);
  if (!residual.is_zero()) {
    out.status = VerifyStatus::not_harmonic;
    out.witness = std::move(residual);
    return out;
  }
  auto [quotient, remainder] = divide_by_defining(domain, u - f);
  if (!remainder.is_zero()) {
    out.status = VerifyStatus::boundary_mismatch;
    out.witness = std::move(remainder);
    return out;
  }
  DirichletCertificate cert{Polynomial(domain.dim), std::move(quotient), f.degree().value_or(0), 0};
  out.certificate = std::move(cert);
  return out;
}

/// Polynomial Dirichlet solver for one domain. Factorizations of the homogeneous
/// parity blocks are cached, so repeated solves on the same domain reuse them.
class FischerSolver {
 public:
  explicit FischerSolver(DomainSpec domain) : domain_(std::move(domain)), p_(defining_polynomial(domain_)) {}

  const DomainSpec& domain() const { return domain_; }

  /// q = F⁻¹(g) for g ∈ P_m, by back substitution over the grading.
  Polynomial inverse(const Polynomial& g) {
    if (g.dim() != domain_.dim) throw DimensionMismatch(domain_.dim, g.dim());
    Polynomial q(domain_.dim);
    const auto deg = g.degree();
    if (!deg) return q;
    const auto parts = homogeneous_decompose(g);
    // Degree k + 2 solution feeds the degree-k right-hand side through +Δq_{k+2}.
    std::vector<Polynomial> qk(*deg + 3, Polynomial(domain_.dim));
    for (unsigned k = *deg + 1; k-- > 0;) {
      Polynomial rhs = parts.components[k] + laplacian(qk[k + 2]);
      if (rhs.is_zero()) continue;
      qk[k] = solve_homogeneous(k, rhs);
      q += qk[k];
    }
    return q;
  }

  DirichletSolution solve(const Polynomial& f) {
    if (f.dim() != domain_.dim) throw DimensionMismatch(domain_.dim, f.dim());
    const Polynomial g = laplacian(f);
    const Polynomial q = inverse(g);
    Polynomial u = f - p_ * q;
    DirichletCertificate cert{laplacian(u), -q, f.degree().value_or(0),
                              g.degree() ? graded_basis_size(domain_.dim, *g.degree()) : 0};
    if (!cert.residual_laplacian.is_zero() || p_ * cert.boundary_quotient + f != u)
      throw std::logic_error("internal error: Dirichlet certificate failed after exact solve");
    return {std::move(u), std::move(cert)};
  }

  /// Solves L_k q = rhs for homogeneous rhs of degree k.
  Polynomial solve_homogeneous(unsigned k, const Polynomial& rhs) {
    std::map<std::uint64_t, std::vector<std::pair<const MultiIndex*, const Rational*>>> by_class;
    for (const auto& [alpha, c] : rhs.terms()) {
      if (total_degree(alpha) != k) throw std::invalid_argument("right-hand side is not homogeneous of degree k");
      by_class[parity_mask(alpha)].emplace_back(&alpha, &c);
    }
    Polynomial q(domain_.dim);
    for (const auto& [parity, entries] : by_class) {
      const auto& fac = factorization(k, parity);
      std::vector<Rational> b(fac.block.basis.size());
      for (const auto& [alpha, c] : entries) b[fac.block.index.at(*alpha)] = *c;
      const auto x = fac.lu.solve(b);
      for (std::size_t i = 0; i < x.size(); ++i) q.add_term(fac.block.basis[i], x[i]);
    }
    return q;
  }

  std::size_t cached_blocks() const { return cache_.size(); }

 private:
  struct Factorized {
    HomogeneousBlock block;
    ExactLU lu;
  };

  const Factorized& factorization(unsigned k, std::uint64_t parity) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(k, parity);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    HomogeneousBlock block = homogeneous_block(domain_, k, parity);
    try {
      ExactLU lu(block.matrix);
      auto entry = std::make_unique<Factorized>(Factorized{std::move(block), std::move(lu)});
      return *cache_.emplace(key, std::move(entry)).first->second;
    } catch (const SingularMatrix&) {
      throw SingularFischerBlock(k, parity);
    }
  }

  DomainSpec domain_;
  Polynomial p_;
  std::mutex mutex_;
  std::map<std::pair<unsigned, std::uint64_t>, std::unique_ptr<Factorized>> cache_;
};

/// Unique polynomial solution u ∈ P_m of Δu = 0 in Ω, u = f on Γ, with certificate.
inline DirichletSolution solve_dirichlet_poly(const DomainSpec& domain, const Polynomial& f) {
  domain.validate();
  FischerSolver solver(domain);
  return solver.solve(f);
}

}  // namespace cylharm
