#pragma once

// max_{θ ∈ S^{n-1}} |f(θ)| by quasi-random seeding plus multi-start projected ascent.

#include "cylharm/polynomial.hpp"
#include "cylharm/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cylharm {

struct SphereMaxConfig {
  double tol = 1e-9;
  std::size_t seeds = 4096;
  std::size_t starts = 24;
  std::size_t max_iterations = 5000;
  std::uint64_t seed = 0x5eed5eedULL;
};

struct SphereMaxResult {
  double value = 0.0;
  std::vector<double> argmax;
  bool converged = true;
};

/// Double-precision snapshot of a polynomial with value and gradient evaluation.
class CompiledPolynomial {
 public:
  explicit CompiledPolynomial(const Polynomial& f) : dim_(f.dim()), max_exp_(f.dim(), 0) {
    for (const auto& [alpha, c] : f.terms()) {
      coeffs_.push_back(to_double(c));
      exps_.insert(exps_.end(), alpha.begin(), alpha.end());
      for (std::size_t i = 0; i < dim_; ++i) max_exp_[i] = std::max(max_exp_[i], alpha[i]);
    }
    for (std::size_t i = 0; i < dim_; ++i) offsets_.push_back(i == 0 ? 0 : offsets_[i - 1] + max_exp_[i - 1] + 1);
    powers_.resize(offsets_.empty() ? 0 : offsets_.back() + max_exp_.back() + 1);
  }

  /// Exact-coefficient scaling: terms are multiplied by `scale` before rounding to double.
  CompiledPolynomial(const Polynomial& f, const Rational& scale) : CompiledPolynomial(f * scale) {}

  std::size_t dim() const { return dim_; }

  double value(std::span<const double> x) const {
    fill_powers(x);
    double sum = 0.0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      double term = coeffs_[t];
      const unsigned* e = &exps_[t * dim_];
      for (std::size_t i = 0; i < dim_; ++i) term *= powers_[offsets_[i] + e[i]];
      sum += term;
    }
    return sum;
  }

  /// Returns f(x) and writes ∇f(x) into grad.
  double value_and_gradient(std::span<const double> x, std::span<double> grad) const {
    fill_powers(x);
    std::fill(grad.begin(), grad.end(), 0.0);
    double sum = 0.0;
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      const unsigned* e = &exps_[t * dim_];
      double term = coeffs_[t];
      for (std::size_t i = 0; i < dim_; ++i) term *= powers_[offsets_[i] + e[i]];
      sum += term;
      for (std::size_t i = 0; i < dim_; ++i) {
        if (e[i] == 0) continue;
        double g = coeffs_[t] * e[i] * powers_[offsets_[i] + e[i] - 1];
        for (std::size_t k = 0; k < dim_; ++k)
          if (k != i) g *= powers_[offsets_[k] + e[k]];
        grad[i] += g;
      }
    }
    return sum;
  }

 private:
  void fill_powers(std::span<const double> x) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      double* p = &powers_[offsets_[i]];
      p[0] = 1.0;
      for (unsigned e = 1; e <= max_exp_[i]; ++e) p[e] = p[e - 1] * x[i];
    }
  }

  std::size_t dim_;
  std::vector<unsigned> max_exp_;
  std::vector<std::size_t> offsets_;
  std::vector<double> coeffs_;
  std::vector<unsigned> exps_;
  mutable std::vector<double> powers_;
};

namespace detail {

inline void normalize(std::span<double> x) {
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& v : x) v *= inv;
}

/// Projected gradient ascent of |f| on the sphere from x (updated in place).
inline bool ascend(const CompiledPolynomial& f, std::vector<double>& x, double& best, const SphereMaxConfig& cfg) {
  const std::size_t n = x.size();
  std::vector<double> grad(n), trial(n), tgrad(n);
  double fx = f.value_and_gradient(x, grad);
  double sign = fx < 0 ? -1.0 : 1.0;
  double value = std::fabs(fx);
  double step = 1.0;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    // Tangential component of sign·∇f.
    double radial = 0.0;
    for (std::size_t i = 0; i < n; ++i) radial += grad[i] * x[i];
    double gnorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = sign * (grad[i] - radial * x[i]);
      gnorm2 += grad[i] * grad[i];
    }
    const double scale = std::max(value, 1e-300);
    if (std::sqrt(gnorm2) <= 1e-12 * scale) {
      best = value;
      return true;
    }
    bool accepted = false;
    step = std::min(step * 4.0, 1.0 / std::sqrt(gnorm2) * scale);
    while (step * std::sqrt(gnorm2) > 1e-16 * scale) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * grad[i];
      normalize(trial);
      const double ft = f.value_and_gradient(trial, tgrad);
      const double vt = std::fabs(ft);
      if (vt >= value + 1e-4 * step * gnorm2) {
        const double gain = vt - value;
        x.swap(trial);
        grad.swap(tgrad);
        sign = ft < 0 ? -1.0 : 1.0;
        value = vt;
        accepted = true;
        if (gain <= 1e-3 * cfg.tol * scale) {
          best = value;
          return true;
        }
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      best = value;
      return true;  // no ascent direction resolvable in double precision
    }
  }
  best = value;
  return false;
}

}  // namespace detail

/// Approximates max_{S^{n-1}} |f|. Deterministic for a fixed configuration.
inline SphereMaxResult sphere_max_detailed(const CompiledPolynomial& f, const SphereMaxConfig& cfg = {}) {
  if (!(cfg.tol > 0)) throw std::invalid_argument("sphere_max tolerance must be positive");
  const std::size_t n = f.dim();
  SplitMix64 rng(cfg.seed ^ n);
  std::vector<double> points(cfg.seeds * n);
  std::vector<double> values(cfg.seeds);
  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    std::span<double> p(&points[s * n], n);
    rng.sphere_point(p);
    values[s] = std::fabs(f.value(p));
  }
  // Coordinate axes are cheap extra seeds and often extremal.
  std::vector<double> axis(n);
  SphereMaxResult result;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(axis.begin(), axis.end(), 0.0);
    axis[i] = 1.0;
    const double v = std::fabs(f.value(axis));
    if (v > result.value) {
      result.value = v;
      result.argmax = axis;
    }
  }
  std::vector<std::size_t> order(cfg.seeds);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t starts = std::min(cfg.starts, cfg.seeds);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> x(points.begin() + static_cast<std::ptrdiff_t>(order[s] * n),
                          points.begin() + static_cast<std::ptrdiff_t>((order[s] + 1) * n));
    double best = 0.0;
    result.converged = detail::ascend(f, x, best, cfg) && result.converged;
    if (best > result.value) {
      result.value = best;
      result.argmax = x;
    }
  }
  return result;
}

inline SphereMaxResult sphere_max_detailed(const Polynomial& f, const SphereMaxConfig& cfg = {}) {
  if (f.is_zero()) throw std::invalid_argument("sphere_max of the zero polynomial");
  return sphere_max_detailed(CompiledPolynomial(f), cfg);
}

inline double sphere_max(const Polynomial& f, double tol = 1e-9) {
  SphereMaxConfig cfg;
  cfg.tol = tol;
  return sphere_max_detailed(f, cfg).value;
}

/// log max_{S^{n-1}} |f| for polynomials whose sup-norm under- or overflows a double.
/// Coefficients are rescaled exactly by the largest |coefficient| first.
inline double log_sphere_max(const Polynomial& f, const SphereMaxConfig& cfg = {}) {
  if (f.is_zero()) throw std::invalid_argument("sphere_max of the zero polynomial");
  const Rational scale = max_abs_coefficient(f);
  const Rational inv = 1 / scale;
  const auto r = sphere_max_detailed(CompiledPolynomial(f, inv), cfg);
  return std::log(r.value) + log_abs(scale);
}

}  // namespace cylharm
