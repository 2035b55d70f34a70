#pragma once

// Principal Dirichlet eigenpair of the cylinder's base (closed form on disks,
// finite differences on ellipses), the null solution ψ_λ(x′)·e^{√λ x_n}, and
// certification of the exponential growth hypothesis.

#include "cylharm/order_type.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

/// J₀(x) by its power series in long double; accurate for |x| ≲ 10.
inline long double bessel_j0(long double x) {
  const long double q = -0.25L * x * x;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

/// First positive zero of J₀, by bisection on [2, 3].
inline long double bessel_j0_first_zero() {
  long double lo = 2.0L, hi = 3.0L;  // J₀(2) > 0 > J₀(3)
  while (hi - lo > 1e-15L) {
    const long double mid = 0.5L * (lo + hi);
    (bessel_j0(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

/// Principal Dirichlet eigenvalue of the disk of radius a: (j₀,₁/a)².
inline double disk_lambda(double a) {
  if (!(a > 0)) throw std::invalid_argument("disk radius must be positive");
  static const long double j01 = bessel_j0_first_zero();
  const long double r = j01 / a;
  return static_cast<double>(r * r);
}

/// Base of the cylinder: ellipse with semi-axes (a, b); a disk when a == b.
struct BaseDomain {
  std::vector<double> semi_axes{1.0, 1.0};

  void validate() const {
    if (semi_axes.size() != 2) throw std::invalid_argument("finite-difference base must be two-dimensional");
    for (double a : semi_axes)
      if (!(a > 0)) throw std::invalid_argument("semi-axes must be positive");
  }
  bool is_disk() const { return semi_axes.size() == 2 && semi_axes[0] == semi_axes[1]; }
  bool contains(double x, double y) const {
    const double u = x / semi_axes[0], v = y / semi_axes[1];
    return u * u + v * v < 1.0 - 1e-12;
  }
};

/// Uniform mesh x_i = (i − Kx)·h, y_j = (j − Ky)·h over the bounding box, with
/// h = 2·max(a, b)/(N − 1).
struct Mesh2D {
  std::size_t nx = 0, ny = 0;
  int kx = 0, ky = 0;
  double h = 0.0;

  double x(std::size_t i) const { return (static_cast<int>(i) - kx) * h; }
  double y(std::size_t j) const { return (static_cast<int>(j) - ky) * h; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

  static Mesh2D for_base(const BaseDomain& base, std::size_t N) {
    const double amax = std::max(base.semi_axes[0], base.semi_axes[1]);
    Mesh2D m;
    m.h = 2.0 * amax / static_cast<double>(N - 1);
    // One padding ring beyond the semi-axes keeps the box rim outside D.
    m.kx = static_cast<int>(std::floor(base.semi_axes[0] / m.h + 1e-9)) + 1;
    m.ky = static_cast<int>(std::floor(base.semi_axes[1] / m.h + 1e-9)) + 1;
    m.nx = static_cast<std::size_t>(2 * m.kx + 1);
    m.ny = static_cast<std::size_t>(2 * m.ky + 1);
    return m;
  }
};

struct EigenConfig {
  double cg_tolerance = 1e-10;
  std::size_t max_outer = 500;
  std::size_t max_cg = 100000;
  double residual_target = 1e-8;  // relative: ‖Δ_hψ + λψ‖ / (λ‖ψ‖)
};

struct EigenResult {
  double lambda = 0.0;
  Mesh2D mesh;
  std::vector<double> psi;  // row-major ny × nx, zero outside D, max |ψ| = 1
  double residual = 0.0;    // ‖Δ_hψ + λψ‖ / ‖ψ‖
  std::size_t iterations = 0;
  std::size_t cg_iterations = 0;
  bool converged = false;
};

class EigenNotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// −Δ_h restricted to interior nodes (5-point stencil, masked nodes are Dirichlet zeros).
class MaskedLaplacian {
 public:
  MaskedLaplacian(const BaseDomain& base, const Mesh2D& mesh) : mesh_(mesh), node_(mesh.nx * mesh.ny, -1) {
    for (std::size_t j = 0; j < mesh.ny; ++j)
      for (std::size_t i = 0; i < mesh.nx; ++i)
        if (base.contains(mesh.x(i), mesh.y(j))) {
          node_[mesh.index(i, j)] = static_cast<long>(cells_.size());
          cells_.push_back(mesh.index(i, j));
        }
    neighbors_.assign(cells_.size() * 4, -1);
    for (std::size_t u = 0; u < cells_.size(); ++u) {
      const std::size_t i = cells_[u] % mesh.nx, j = cells_[u] / mesh.nx;
      // Masked nodes stay at -1; the bounding box rim is never interior.
      neighbors_[4 * u + 0] = node_[mesh.index(i - 1, j)];
      neighbors_[4 * u + 1] = node_[mesh.index(i + 1, j)];
      neighbors_[4 * u + 2] = node_[mesh.index(i, j - 1)];
      neighbors_[4 * u + 3] = node_[mesh.index(i, j + 1)];
    }
    inv_h2_ = 1.0 / (mesh.h * mesh.h);
  }

  std::size_t size() const { return cells_.size(); }
  const std::vector<std::size_t>& cells() const { return cells_; }

  void apply(const std::vector<double>& v, std::vector<double>& out) const {
    for (std::size_t u = 0; u < cells_.size(); ++u) {
      double s = 4.0 * v[u];
      for (int k = 0; k < 4; ++k) {
        const long nb = neighbors_[4 * u + static_cast<std::size_t>(k)];
        if (nb >= 0) s -= v[static_cast<std::size_t>(nb)];
      }
      out[u] = s * inv_h2_;
    }
  }

 private:
  Mesh2D mesh_;
  std::vector<long> node_;
  std::vector<std::size_t> cells_;
  std::vector<long> neighbors_;
  double inv_h2_ = 0.0;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Conjugate gradients for A x = b from the initial guess in x; returns iterations used.
inline std::size_t conjugate_gradient(const MaskedLaplacian& a, const std::vector<double>& b, std::vector<double>& x,
                                      double tol, std::size_t max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), p(n), ap(n);
  a.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  p = r;
  double rr = dot(r, r);
  const double stop = tol * tol * dot(b, b);
  std::size_t it = 0;
  for (; it < max_iter && rr > stop; ++it) {
    a.apply(p, ap);
    const double alpha = rr / dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return it;
}

}  // namespace detail

/// Smallest eigenpair of −Δ_h on the masked ellipse by inverse power iteration.
inline EigenResult fd_dirichlet_eigen(const BaseDomain& base, std::size_t N, const EigenConfig& cfg = {}) {
  base.validate();
  if (N < 33) throw std::invalid_argument("grid size must be at least 33");
  EigenResult out;
  out.mesh = Mesh2D::for_base(base, N);
  const detail::MaskedLaplacian op(base, out.mesh);
  const std::size_t n = op.size();
  std::vector<double> v(n, 1.0), w(n, 0.0), av(n);
  double norm = std::sqrt(detail::dot(v, v));
  for (double& x : v) x /= norm;
  double lambda = 0.0;
  for (out.iterations = 1; out.iterations <= cfg.max_outer; ++out.iterations) {
    // Warm start: A⁻¹v ≈ v/λ once the iteration settles.
    if (lambda > 0)
      for (std::size_t i = 0; i < n; ++i) w[i] = v[i] / lambda;
    out.cg_iterations += detail::conjugate_gradient(op, v, w, cfg.cg_tolerance, cfg.max_cg);
    norm = std::sqrt(detail::dot(w, w));
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    op.apply(v, av);
    lambda = detail::dot(v, av);
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) res2 += (av[i] - lambda * v[i]) * (av[i] - lambda * v[i]);
    out.residual = std::sqrt(res2);
    if (out.residual <= cfg.residual_target * lambda) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) throw EigenNotConverged("inverse iteration did not converge within the iteration budget");
  out.lambda = lambda;
  double vmax = 0.0, vsum = 0.0;
  for (double x : v) {
    vsum += x;
    if (std::fabs(x) > std::fabs(vmax)) vmax = x;
  }
  const double scale = (vsum < 0 ? -1.0 : 1.0) / std::fabs(vmax);
  out.psi.assign(out.mesh.nx * out.mesh.ny, 0.0);
  for (std::size_t u = 0; u < n; ++u) out.psi[op.cells()[u]] = v[u] * scale;
  return out;
}

/// Samples of ψ_λ(x′)·e^{√λ x_n}; z_k = (k − Kz)·h with Kz = round(L/h).
struct NullSolutionSample {
  Mesh2D mesh;
  std::size_t nz = 0;
  int kz = 0;
  double h = 0.0;
  double L = 0.0;
  double lambda = 0.0;
  std::vector<double> values;  // index (k·ny + j)·nx + i

  double z(std::size_t k) const { return (static_cast<int>(k) - kz) * h; }
  double& at(std::size_t i, std::size_t j, std::size_t k) { return values[(k * mesh.ny + j) * mesh.nx + i]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[(k * mesh.ny + j) * mesh.nx + i]; }

  /// Max |value| on the slice z = z_k.
  double slice_max(std::size_t k) const {
    const std::size_t plane = mesh.nx * mesh.ny;
    double best = 0.0;
    for (std::size_t p = 0; p < plane; ++p) best = std::max(best, std::fabs(values[k * plane + p]));
    return best;
  }
};

inline NullSolutionSample null_solution_sample(const EigenResult& eig, double L) {
  if (!(L > 0)) throw std::invalid_argument("null-solution length must be positive");
  NullSolutionSample s;
  s.mesh = eig.mesh;
  s.h = eig.mesh.h;
  s.L = L;
  s.lambda = eig.lambda;
  s.kz = static_cast<int>(std::lround(L / s.h));
  s.nz = static_cast<std::size_t>(2 * s.kz + 1);
  const std::size_t plane = s.mesh.nx * s.mesh.ny;
  s.values.resize(plane * s.nz);
  const double root = std::sqrt(eig.lambda);
  for (std::size_t k = 0; k < s.nz; ++k) {
    const double growth = std::exp(root * s.z(k));
    for (std::size_t p = 0; p < plane; ++p) s.values[k * plane + p] = eig.psi[p] * growth;
  }
  return s;
}

/// Max over interior nodes of |Δ_h u| for the 7-point 3-D Laplacian, divided by max |u|.
inline double null_solution_residual(const NullSolutionSample& s) {
  const auto& m = s.mesh;
  const double inv_h2 = 1.0 / (s.h * s.h);
  double worst = 0.0, umax = 0.0;
  for (std::size_t k = 1; k + 1 < s.nz; ++k)
    for (std::size_t j = 1; j + 1 < m.ny; ++j)
      for (std::size_t i = 1; i + 1 < m.nx; ++i) {
        const double c = s.at(i, j, k);
        umax = std::max(umax, std::fabs(c));
        if (c == 0.0) continue;  // masked node
        const double lap = (s.at(i - 1, j, k) + s.at(i + 1, j, k) + s.at(i, j - 1, k) + s.at(i, j + 1, k) +
                            s.at(i, j, k - 1) + s.at(i, j, k + 1) - 6.0 * c) *
                           inv_h2;
        worst = std::max(worst, std::fabs(lap));
      }
  return umax > 0 ? worst / umax : 0.0;
}

/// Grid file: text header then little-endian doubles.
///   cylharm-grid 1
///   dims <nx> <ny> <nz>
///   h <h>
///   L <L>
///   lambda <lambda>
///   data
inline void write_grid(std::ostream& out, const NullSolutionSample& s) {
  out << "cylharm-grid 1\n";
  out << "dims " << s.mesh.nx << ' ' << s.mesh.ny << ' ' << s.nz << '\n';
  out.precision(17);
  out << "h " << s.h << "\nL " << s.L << "\nlambda " << s.lambda << "\ndata\n";
  static_assert(std::endian::native == std::endian::little, "grid writer assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
}

inline NullSolutionSample read_grid(std::istream& in) {
  auto expect = [&](const std::string& key) {
    std::string word;
    if (!(in >> word) || word != key) throw std::runtime_error("grid file: expected '" + key + "'");
  };
  expect("cylharm-grid");
  int version = 0;
  in >> version;
  if (version != 1) throw std::runtime_error("grid file: unsupported version " + std::to_string(version));
  NullSolutionSample s;
  expect("dims");
  in >> s.mesh.nx >> s.mesh.ny >> s.nz;
  expect("h");
  in >> s.h;
  expect("L");
  in >> s.L;
  expect("lambda");
  in >> s.lambda;
  expect("data");
  in.get();  // newline
  if (!in) throw std::runtime_error("grid file: malformed header");
  s.mesh.h = s.h;
  s.mesh.kx = static_cast<int>(s.mesh.nx / 2);
  s.mesh.ky = static_cast<int>(s.mesh.ny / 2);
  s.kz = static_cast<int>(s.nz / 2);
  s.values.resize(s.mesh.nx * s.mesh.ny * s.nz);
  in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(s.values.size() * sizeof(double)))
    throw std::runtime_error("grid file: truncated sample block");
  return s;
}

struct GrowthReport {
  bool certified = false;
  double rho_hat = 0.0;
  double margin = 0.0;  // 1 − ρ̂
  double lambda = 0.0;
  std::string reason;
};

/// ρ̂ < 1 ⇒ ∫ e^{−√λ|x_n|} ∫_{∂D} |f| dσ dx_n < ∞ (sub-exponential data against an exponential weight).
inline GrowthReport growth_condition_certify(const OrderTypeEstimate& est, double lambda) {
  GrowthReport r;
  r.rho_hat = est.rho_hat;
  r.margin = 1.0 - est.rho_hat;
  r.lambda = lambda;
  if (!est.stable) {
    r.reason = "hypothesis not established: order estimate unstable over the window";
  } else if (est.rho_hat >= 1.0) {
    r.reason = "hypothesis not established: estimated order >= 1";
  } else {
    r.certified = true;
    r.reason = "order < 1: growth condition holds";
  }
  return r;
}

/// Certification directly from data: exact polynomials have order 0.
inline GrowthReport growth_condition_certify(const HomogeneousSeries& data, double lambda, const OrderTypeConfig& cfg = {}) {
  if (data.is_polynomial) {
    GrowthReport r;
    r.certified = true;
    r.margin = 1.0;
    r.lambda = lambda;
    r.reason = "polynomial data (order 0): growth condition holds";
    return r;
  }
  try {
    return growth_condition_certify(order_type_estimate(data, cfg), lambda);
  } catch (const OrderTypeError& e) {
    GrowthReport r;
    r.lambda = lambda;
    r.rho_hat = std::numeric_limits<double>::quiet_NaN();
    r.margin = std::numeric_limits<double>::quiet_NaN();
    r.reason = std::string("hypothesis not established: ") + e.what();
    return r;
  }
}

}  // namespace cylharm
