#pragma once

// Order and type of an entire function from the sup-norms M_m of its homogeneous
// components.
//
// Reported sequences follow the classical coefficient formulas:
//   ρ_m = m·log m / (−log M_m),     t_m = m·M_m^{ρ̂/m}   (limsup t_m = e·ρ·τ).
// Both converge only logarithmically, so ρ̂ and τ̂ come from a least-squares fit of
//   log M_m ≈ a·m·log m + b·m + c·log m + d
// over the tail window; matching against M_m ~ (eρτ/m)^{m/ρ} gives ρ = −1/a and
// eρτ = exp(b·ρ). The c and d terms absorb the Stirling-type corrections.

#include "cylharm/series.hpp"
#include "cylharm/sphere_max.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cylharm {

class OrderTypeError : public std::runtime_error {
 public:
  enum class Kind { insufficient_data, not_entire_like };
  OrderTypeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct OrderTypeConfig {
  double tol = 1e-9;
  std::size_t min_components = 8;
  std::size_t min_window_points = 6;
  double window_fraction = 0.5;
  double min_root_decay = 0.9;     // r_hi / r_lo must fall below this over the window
  double stability_tolerance = 0.1;
};

struct OrderTypeEstimate {
  std::map<unsigned, double> log_M;     // log M_m
  std::map<unsigned, double> M_seq;     // M_m (0 when below the double range)
  std::map<unsigned, double> rho_seq;   // m log m / (−log M_m), for M_m ∈ (0, 1)
  std::map<unsigned, double> type_seq;  // m·M_m^{ρ̂/m}
  double rho_hat = 0.0;
  double type_hat = 0.0;
  double rho_classical = 0.0;  // sup of rho_seq over the window
  double type_classical = 0.0; // sup of type_seq over the window divided by e·ρ̂
  unsigned window_lo = 0;
  unsigned window_hi = 0;
  bool stable = true;
  double rho_upper_window = 0.0;  // fit restricted to the upper half of the window
};

namespace detail {

struct TailFit {
  double rho = 0.0;
  double e_rho_tau = 0.0;
};

inline TailFit fit_tail(const std::map<unsigned, double>& log_M, unsigned lo, unsigned hi) {
  std::vector<std::pair<unsigned, double>> pts;
  for (const auto& [m, v] : log_M)
    if (m >= lo && m <= hi && m >= 2) pts.emplace_back(m, v);
  const auto rows = static_cast<Eigen::Index>(pts.size());
  const Eigen::Index cols = std::min<Eigen::Index>(4, rows);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double m = pts[static_cast<std::size_t>(i)].first;
    const double basis[4] = {m * std::log(m), m, std::log(m), 1.0};
    for (Eigen::Index k = 0; k < cols; ++k) a(i, k) = basis[k];
    y(i) = pts[static_cast<std::size_t>(i)].second;
  }
  // Column scaling keeps the QR well balanced.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < cols; ++k) a.col(k) /= scale(k);
  Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
  for (Eigen::Index k = 0; k < cols; ++k) coef(k) /= scale(k);
  TailFit fit;
  if (coef(0) >= 0) return fit;  // no super-geometric decay
  fit.rho = -1.0 / coef(0);
  fit.e_rho_tau = cols > 1 ? std::exp(coef(1) * fit.rho) : 1.0;
  return fit;
}

}  // namespace detail

/// Core estimator on a sequence of log sup-norms (m → log M_m); absent m means f_m = 0.
inline OrderTypeEstimate order_type_from_log_norms(const std::map<unsigned, double>& log_M, const OrderTypeConfig& cfg = {}) {
  if (log_M.size() < cfg.min_components)
    throw OrderTypeError(OrderTypeError::Kind::insufficient_data,
                         "insufficient data: " + std::to_string(log_M.size()) + " nonzero components, need " +
                             std::to_string(cfg.min_components));
  OrderTypeEstimate est;
  est.log_M = log_M;
  for (const auto& [m, v] : log_M) est.M_seq[m] = std::exp(v);

  const unsigned top = log_M.rbegin()->first;
  unsigned lo = static_cast<unsigned>(std::ceil(top * (1.0 - cfg.window_fraction)));
  auto count_from = [&](unsigned from) {
    std::size_t c = 0;
    for (const auto& [m, v] : log_M) c += (m >= from && m >= 2) ? 1 : 0;
    return c;
  };
  while (lo > 2 && count_from(lo) < cfg.min_window_points) --lo;
  if (count_from(lo) < 4)
    throw OrderTypeError(OrderTypeError::Kind::insufficient_data, "insufficient data: fewer than 4 usable degrees >= 2");
  est.window_lo = lo;
  est.window_hi = top;

  // Root test over the window: entire data needs M_m^{1/m} to keep falling.
  const auto first = log_M.lower_bound(std::max(lo, 2u));
  const double r_lo = std::exp(first->second / first->first);
  const double r_hi = std::exp(log_M.rbegin()->second / top);
  const auto fit = detail::fit_tail(log_M, lo, top);
  if (!(r_hi < cfg.min_root_decay * r_lo) || fit.rho <= 0)
    throw OrderTypeError(OrderTypeError::Kind::not_entire_like,
                         "not entire-like: M_m^(1/m) does not decay super-geometrically over degrees " +
                             std::to_string(lo) + ".." + std::to_string(top));
  est.rho_hat = fit.rho;
  est.type_hat = fit.e_rho_tau / (std::numbers::e * fit.rho);

  const unsigned upper_lo = lo + (top - lo) / 2;
  if (count_from(upper_lo) >= 4) {
    est.rho_upper_window = detail::fit_tail(log_M, upper_lo, top).rho;
    est.stable = std::fabs(est.rho_upper_window - est.rho_hat) <= cfg.stability_tolerance * est.rho_hat;
  } else {
    est.rho_upper_window = est.rho_hat;
  }

  for (const auto& [m, v] : log_M) {
    if (m < 2) continue;
    if (v < 0) est.rho_seq[m] = m * std::log(static_cast<double>(m)) / -v;
    est.type_seq[m] = m * std::exp(est.rho_hat * v / m);
    if (m >= lo) {
      if (est.rho_seq.count(m)) est.rho_classical = std::max(est.rho_classical, est.rho_seq[m]);
      est.type_classical = std::max(est.type_classical, est.type_seq[m] / (std::numbers::e * est.rho_hat));
    }
  }
  return est;
}

/// log M_m = log max_{S^{n-1}} |f_m| for every nonzero component.
inline std::map<unsigned, double> component_log_norms(const HomogeneousSeries& data, double tol = 1e-9) {
  SphereMaxConfig smc;
  smc.tol = tol;
  std::map<unsigned, double> out;
  for (std::size_t m = 0; m < data.components.size(); ++m)
    if (!data.components[m].is_zero()) out[static_cast<unsigned>(m)] = log_sphere_max(data.components[m], smc);
  return out;
}

inline OrderTypeEstimate order_type_estimate(const HomogeneousSeries& data, const OrderTypeConfig& cfg = {}) {
  data.validate();
  if (data.nonzero_count() < cfg.min_components)
    throw OrderTypeError(OrderTypeError::Kind::insufficient_data,
                         "insufficient data: " + std::to_string(data.nonzero_count()) + " nonzero components, need " +
                             std::to_string(cfg.min_components));
  return order_type_from_log_norms(component_log_norms(data, cfg.tol), cfg);
}

}  // namespace cylharm
