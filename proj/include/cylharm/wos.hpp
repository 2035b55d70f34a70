#pragma once

// Walk-on-spheres sampling of harmonic measure on an ellipsoidal cylinder and the
// fit of its axial decay rate.

#include "cylharm/domain.hpp"
#include "cylharm/parallel.hpp"
#include "cylharm/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

/// Distance from an interior point (x, y) of the ellipse x²/a² + y²/b² < 1 to its boundary.
/// Newton on the projection equation with a bisection bracket, tolerance 1e-12.
inline double ellipse_interior_distance(double a, double b, double x, double y) {
  if (a == b) return a - std::hypot(x, y);
  // Work in the first quadrant with a ≥ b.
  x = std::fabs(x);
  y = std::fabs(y);
  if (a < b) {
    std::swap(a, b);
    std::swap(x, y);
  }
  if (y == 0.0) {
    // On the major axis the nearest point is off-axis when x < (a² − b²)/a.
    const double critical = (a * a - b * b) / a;
    if (x < critical) {
      const double x0 = a * a * x / (a * a - b * b);
      const double y0 = b * std::sqrt(std::max(0.0, 1.0 - (x0 / a) * (x0 / a)));
      return std::hypot(x0 - x, y0);
    }
    return a - x;
  }
  if (x == 0.0) return b - y;
  // Closest point (a²x/(t+a²), b²y/(t+b²)) with F(t) = (ax/(t+a²))² + (by/(t+b²))² − 1 = 0, t ∈ (−b², 0].
  double lo = -b * b + b * y;  // F(lo) ≥ 0 since the v term alone is ≥ 1 there
  double hi = 0.0;             // F(0) < 0 for interior points
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double u = a * x / (t + a * a), v = b * y / (t + b * b);
    const double f = u * u + v * v - 1.0;
    if (f > 0) lo = t;
    else hi = t;
    const double df = -2.0 * (u * u / (t + a * a) + v * v / (t + b * b));
    double next = t - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 1e-12 * std::max(1.0, std::fabs(t)) || hi - lo <= 1e-15 * b * b) {
      t = next;
      break;
    }
    t = next;
  }
  const double px = a * a * x / (t + a * a), py = b * b * y / (t + b * b);
  return std::hypot(px - x, py - y);
}

struct WalkConfig {
  std::vector<double> start;  // point in Ω (length n)
  double eps_shell = 1e-6;
  std::size_t max_steps = 1000000;
  std::size_t walks = 100000;
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

struct ExitRecord {
  double y_axial = 0.0;          // x_n at absorption
  double y_base_angle = 0.0;     // atan2 of the exit point's base coordinates (x₂, x₁)
  std::size_t steps = 0;
  std::vector<double> exit_base; // projected exit point on ∂D (length n−1)
};

struct WalkBatch {
  std::vector<ExitRecord> records;  // accepted walks, in walk-index order
  std::size_t discarded = 0;        // walks that hit max_steps
};

/// Distance from the base coordinates to ∂D for a cylinder domain.
inline double lateral_distance(const DomainSpec& d, std::span<const double> base) {
  const std::size_t k = d.dim - 1;
  bool circular = true;
  for (std::size_t j = 1; j < k; ++j) circular = circular && d.axes_squared[j] == d.axes_squared[0];
  if (circular) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) r2 += base[j] * base[j];
    return std::sqrt(to_double(d.axes_squared[0])) - std::sqrt(r2);
  }
  if (k != 2) throw std::invalid_argument("non-circular bases are supported in three dimensions only");
  return ellipse_interior_distance(std::sqrt(to_double(d.axes_squared[0])), std::sqrt(to_double(d.axes_squared[1])),
                                   base[0], base[1]);
}

/// Radial projection of base coordinates onto ∂D.
inline std::vector<double> project_to_boundary(const DomainSpec& d, std::span<const double> base) {
  double s = 0.0;
  for (std::size_t j = 0; j < base.size(); ++j) s += base[j] * base[j] / to_double(d.axes_squared[j]);
  std::vector<double> out(base.begin(), base.end());
  if (s == 0.0) return out;
  const double scale = 1.0 / std::sqrt(s);
  for (double& v : out) v *= scale;
  return out;
}

/// One walk; returns false if the step cap was hit.
inline bool walk_on_spheres(const DomainSpec& d, const WalkConfig& cfg, std::uint64_t index, ExitRecord& rec) {
  const std::size_t n = d.dim;
  auto rng = SplitMix64::substream(cfg.seed, index);
  std::vector<double> x = cfg.start, dir(n);
  for (std::size_t step = 0;; ++step) {
    const double dist = lateral_distance(d, std::span<const double>(x.data(), n - 1));
    if (dist <= cfg.eps_shell) {
      rec.steps = step;
      rec.y_axial = x[n - 1];
      rec.exit_base = project_to_boundary(d, std::span<const double>(x.data(), n - 1));
      rec.y_base_angle = n >= 3 ? std::atan2(rec.exit_base[1], rec.exit_base[0]) : (rec.exit_base[0] > 0 ? 0.0 : std::numbers::pi);
      return true;
    }
    if (step >= cfg.max_steps) return false;
    rng.sphere_point(dir);
    for (std::size_t i = 0; i < n; ++i) x[i] += dist * dir[i];
  }
}

/// Exit records of cfg.walks independent walks. Walk w draws from substream (seed, w),
/// so the result does not depend on cfg.threads.
inline WalkBatch wos_exit(const DomainSpec& d, const WalkConfig& cfg) {
  d.validate();
  if (d.kind != DomainKind::cylinder) throw std::invalid_argument("walk-on-spheres needs a cylinder domain");
  if (cfg.start.size() != d.dim) throw DimensionMismatch(d.dim, cfg.start.size());
  if (!(cfg.eps_shell > 0)) throw std::invalid_argument("eps_shell must be positive");
  if (!(lateral_distance(d, std::span<const double>(cfg.start.data(), d.dim - 1)) > 0))
    throw std::invalid_argument("start point is outside the domain");
  std::vector<ExitRecord> all(cfg.walks);
  std::vector<char> ok(cfg.walks, 0);
  parallel_for(cfg.walks, cfg.threads, [&](std::size_t w) { ok[w] = walk_on_spheres(d, cfg, w, all[w]) ? 1 : 0; });
  WalkBatch batch;
  for (std::size_t w = 0; w < cfg.walks; ++w) {
    if (ok[w]) batch.records.push_back(std::move(all[w]));
    else ++batch.discarded;
  }
  return batch;
}

inline std::string format_real(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

class DecayFitError : public std::runtime_error {
 public:
  enum class Kind { insufficient_tail_mass, insufficient_records };
  DecayFitError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct DecayFitConfig {
  double t_lo = 1.0;
  double dt = 0.05;
  std::size_t exceedance_floor = 100;
  std::size_t min_records = 10000;
  std::size_t bootstrap = 200;
  std::uint64_t bootstrap_seed = 0xb007;
  double curvature_threshold = 0.25;
};

struct DecayFitReport {
  std::vector<double> t_grid;
  std::vector<double> survival;  // P(|y_n| > t) on t_grid
  double nu_hat = 0.0;
  double stderr_ = 0.0;          // bootstrap standard error of nu_hat
  double reference_rate = 0.0;   // √λ
  double t_lo = 0.0, t_hi = 0.0;
  double curvature = 0.0;        // relative change of the local slope across the window
  bool curvature_ok = true;
  std::size_t records = 0;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double curvature = 0.0;
};

/// OLS of log S(t) = c − ν·t on the grid points of [t_lo, t_hi], plus a quadratic
/// fit whose curvature term is reported relative to ν.
inline LineFit fit_log_survival(const std::vector<double>& sorted_abs, double t_lo, double t_hi, double dt) {
  std::vector<double> ts, ys;
  const double total = static_cast<double>(sorted_abs.size());
  for (double t = t_lo; t <= t_hi + 1e-12; t += dt) {
    const auto above = static_cast<double>(sorted_abs.end() - std::upper_bound(sorted_abs.begin(), sorted_abs.end(), t));
    if (above <= 0) break;
    ts.push_back(t);
    ys.push_back(std::log(above / total));
  }
  LineFit fit;
  const auto n = static_cast<double>(ts.size());
  if (ts.size() < 2) return fit;
  double mt = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
  }
  fit.slope = -sty / stt;
  if (ts.size() >= 3) {
    // Quadratic term from the linear-fit residuals. On a uniform grid the centered
    // square is already orthogonal to the centered linear term.
    double sqq = 0, sqy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double c = ts[i] - mt;
      const double qi = c * c - stt / n;
      sqq += qi * qi;
      sqy += qi * (ys[i] - my + fit.slope * c);
    }
    const double c2 = sqq > 0 ? sqy / sqq : 0.0;
    fit.curvature = fit.slope > 0 ? std::fabs(2.0 * c2 * (t_hi - t_lo)) / fit.slope : 0.0;
  }
  return fit;
}

}  // namespace detail

/// Least-squares fit of the exponential tail rate of |y_n| over [t_lo, t_hi], where
/// t_hi is the largest grid point with at least `exceedance_floor` exceedances.
inline DecayFitReport decay_fit(const std::vector<double>& axial, double lambda, const DecayFitConfig& cfg = {}) {
  std::vector<double> sorted(axial.size());
  std::transform(axial.begin(), axial.end(), sorted.begin(), [](double v) { return std::fabs(v); });
  std::sort(sorted.begin(), sorted.end());
  DecayFitReport rep;
  rep.records = sorted.size();
  rep.reference_rate = std::sqrt(lambda);
  rep.t_lo = cfg.t_lo;
  const double total = static_cast<double>(sorted.size());
  rep.t_hi = -1.0;
  for (std::size_t g = 0;; ++g) {
    const double t = g * cfg.dt;
    const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
    if (above == 0 && g > 0) break;
    rep.t_grid.push_back(t);
    rep.survival.push_back(total > 0 ? static_cast<double>(above) / total : 0.0);
    if (above >= cfg.exceedance_floor) rep.t_hi = t;
    if (above == 0) break;
  }
  if (!(rep.t_hi > rep.t_lo))
    throw DecayFitError(DecayFitError::Kind::insufficient_tail_mass,
                        "insufficient tail mass: fewer than " + std::to_string(cfg.exceedance_floor) +
                            " exceedances beyond t_lo = " + format_real(cfg.t_lo));
  if (sorted.size() < cfg.min_records)
    throw DecayFitError(DecayFitError::Kind::insufficient_records,
                        "insufficient records: " + std::to_string(sorted.size()) + " < " + std::to_string(cfg.min_records));
  const auto fit = detail::fit_log_survival(sorted, rep.t_lo, rep.t_hi, cfg.dt);
  rep.nu_hat = fit.slope;
  rep.curvature = fit.curvature;
  rep.curvature_ok = fit.curvature <= cfg.curvature_threshold;

  // Bootstrap standard error with a fixed resampling stream.
  SplitMix64 rng(cfg.bootstrap_seed);
  std::vector<double> resample(sorted.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < cfg.bootstrap; ++b) {
    for (auto& v : resample) v = sorted[rng.next() % sorted.size()];
    std::sort(resample.begin(), resample.end());
    const double nu = detail::fit_log_survival(resample, rep.t_lo, rep.t_hi, cfg.dt).slope;
    s1 += nu;
    s2 += nu * nu;
  }
  if (cfg.bootstrap > 1) {
    const double mean = s1 / cfg.bootstrap;
    rep.stderr_ = std::sqrt(std::max(0.0, (s2 - cfg.bootstrap * mean * mean) / (cfg.bootstrap - 1)));
  }
  return rep;
}

inline DecayFitReport decay_fit(const std::vector<ExitRecord>& records, double lambda, const DecayFitConfig& cfg = {}) {
  std::vector<double> axial;
  axial.reserve(records.size());
  for (const auto& r : records) axial.push_back(r.y_axial);
  return decay_fit(axial, lambda, cfg);
}

}  // namespace cylharm
