#pragma once

// Quantitative pieces of the entirety argument: homogeneous-component ratios of
// harmonic polynomials, the per-degree solution bound Ĉ·M_m·B^m·m!, and the
// explicit degree-j tail majorant with its j-th root.

#include "cylharm/polynomial.hpp"
#include "cylharm/sphere_max.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

class NotHarmonic : public std::invalid_argument {
 public:
  explicit NotHarmonic(Polynomial residual)
      : std::invalid_argument("not harmonic: Laplacian residual is nonzero"), residual_(std::move(residual)) {}
  const Polynomial& residual() const { return residual_; }

 private:
  Polynomial residual_;
};

struct ComponentBoundReport {
  std::size_t dim = 0;
  std::map<unsigned, double> ratios;  // k → sphere_max(v_k) / (k^{n/2} sphere_max(v))
  double max_ratio = 0.0;
  unsigned argmax = 0;
};

/// For harmonic v = Σ v_k, ratio_k = max|v_k| / (k^{n/2}·max|v|) on S^{n-1}, 1 ≤ k ≤ deg v.
inline ComponentBoundReport homog_component_bound_check(const Polynomial& v, double tol = 1e-9) {
  Polynomial residual = laplacian(v);
  if (!residual.is_zero()) throw NotHarmonic(std::move(residual));
  ComponentBoundReport out;
  out.dim = v.dim();
  if (v.is_zero()) return out;
  SphereMaxConfig smc;
  smc.tol = tol;
  const double log_total = log_sphere_max(v, smc);
  const auto parts = homogeneous_decompose(v);
  const double half_n = 0.5 * static_cast<double>(v.dim());
  for (unsigned k = 1; k < parts.components.size(); ++k) {
    double ratio = 0.0;
    if (!parts.components[k].is_zero())
      ratio = std::exp(log_sphere_max(parts.components[k], smc) - log_total - half_n * std::log(static_cast<double>(k)));
    out.ratios[k] = ratio;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax = k;
    }
  }
  return out;
}

/// Parameters of the tail estimate. The constants Ĉ, C′, C″, C‴ are not known
/// explicitly; they default to 1 and only scale the bounds.
struct TailBoundParams {
  std::size_t n = 3;
  double A = 1.0;       // maximum semi-axis of the base
  double lambda = 1.0;  // principal Dirichlet eigenvalue of the base
  double delta1 = 0.25;
  double delta2 = 0.25;
  double C_hat = 1.0;
  double C_prime = 1.0;
  double C_dprime = 1.0;
  double C_tprime = 1.0;

  double delta() const { return delta1 + delta2; }
  /// B = 2·max(A, 1/√λ), always recomputed from A and λ.
  double B() const { return 2.0 * std::max(A, 1.0 / std::sqrt(lambda)); }

  void validate() const {
    if (!(delta1 > 0)) throw std::invalid_argument("divergent configuration: delta1 must be positive");
    if (!(delta2 > 0)) throw std::invalid_argument("divergent configuration: delta2 must be positive");
    if (!(lambda > 0) || !(A > 0)) throw std::invalid_argument("A and lambda must be positive");
  }
};

/// (A^m + m!/λ^{m/2}); the axial integral ∫₀^∞ (A^m + y^m) e^{−√λ y} dy equals this over √λ.
inline long double axial_moment_factor(double A, double lambda, unsigned m) {
  const long double lm = m;
  return std::pow(static_cast<long double>(A), lm) +
         std::exp(std::lgamma(lm + 1.0L) - 0.5L * lm * std::log(static_cast<long double>(lambda)));
}

/// ∫₀^∞ (A^m + y^m) e^{−√λ y} dy = A^m/√λ + m!/λ^{(m+1)/2}.
inline long double axial_integral(double A, double lambda, unsigned m) {
  return axial_moment_factor(A, lambda, m) / std::sqrt(static_cast<long double>(lambda));
}

/// log of the per-degree solution bound Ĉ·M_m·B^m·m!, given log M_m.
inline long double log_solution_bound(const TailBoundParams& p, double log_M, unsigned m) {
  const long double lm = m;
  return std::log(static_cast<long double>(p.C_hat)) + log_M + lm * std::log(static_cast<long double>(p.B())) +
         std::lgamma(lm + 1.0L);
}

/// C‴·j^{n/2}·j^{−δ₁ j} / (1 − j^{−δ₁}).
inline long double tail_majorant(const TailBoundParams& p, unsigned j) {
  p.validate();
  if (j < 2) throw std::invalid_argument("tail bound needs j >= 2");
  const long double lj = std::log(static_cast<long double>(j));
  const long double d1 = p.delta1;
  const long double ratio = std::exp(-d1 * lj);
  return static_cast<long double>(p.C_tprime) * std::exp(0.5L * p.n * lj - d1 * j * lj) / (1.0L - ratio);
}

struct TailBound {
  long double majorant = 0.0L;
  std::map<unsigned, long double> log_solution_bounds;  // m → log(Ĉ·M_m·B^m·m!) for audit
};

/// Degree-j tail majorant plus the per-degree audit quantities for the supplied M_m bounds.
inline TailBound tail_bound(const TailBoundParams& p, const std::map<unsigned, double>& log_M_bound, unsigned j) {
  TailBound out;
  out.majorant = tail_majorant(p, j);
  for (const auto& [m, lm] : log_M_bound)
    if (m >= j) out.log_solution_bounds[m] = log_solution_bound(p, lm, m);
  return out;
}

/// log of M_m = m^{−m(1+δ)}, the decay guaranteed for data of order < 1.
inline double log_order_below_one_bound(unsigned m, double delta) {
  return m == 0 ? 0.0 : -static_cast<double>(m) * (1.0 + delta) * std::log(static_cast<double>(m));
}

/// sup over 1 ≤ m ≤ m_max of m·(B/e)^m / m^{mδ₂}: the constant absorbed into C‴.
inline double absorption_constant(const TailBoundParams& p, unsigned m_max) {
  double best = 0.0;
  for (unsigned m = 1; m <= m_max; ++m) {
    const double lm = std::log(static_cast<double>(m));
    best = std::max(best, std::exp(lm + m * (std::log(p.B()) - 1.0) - m * p.delta2 * lm));
  }
  return best;
}

/// j ↦ bound(j)^{1/j}; bound values must be positive.
inline std::map<unsigned, double> jth_root_sequence(const std::map<unsigned, long double>& bound) {
  std::map<unsigned, double> out;
  for (const auto& [j, b] : bound) {
    if (!(b > 0)) throw std::invalid_argument("jth_root_sequence needs positive bounds");
    if (j == 0) continue;
    out[j] = static_cast<double>(std::exp(std::log(b) / static_cast<long double>(j)));
  }
  return out;
}

/// Whether seq is non-increasing from its argmax on, and where the argmax is.
inline std::pair<bool, unsigned> decreasing_after_argmax(const std::map<unsigned, double>& seq) {
  if (seq.empty()) return {true, 0};
  auto peak = std::max_element(seq.begin(), seq.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  double prev = peak->second;
  for (auto it = std::next(peak); it != seq.end(); ++it) {
    if (it->second > prev) return {false, peak->first};
    prev = it->second;
  }
  return {true, peak->first};
}

}  // namespace cylharm
