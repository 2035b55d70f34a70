#pragma once

// Degree-by-degree Dirichlet solves for truncated entire data f = Σ f_m, regrouped
// into output components U_j = Σ_{m≥j} u_{m,j}, and the root-test diagnostic.

#include "cylharm/fischer.hpp"
#include "cylharm/parallel.hpp"
#include "cylharm/poly_io.hpp"
#include "cylharm/sphere_max.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylharm {

/// f_0, ..., f_M with f_m homogeneous of degree m (zero entries allowed).
struct HomogeneousSeries {
  std::size_t dim = 3;
  std::vector<Polynomial> components;
  std::string generator_tag;   // e.g. "powfact2:c=1,d=1"; empty for ad-hoc data
  bool is_polynomial = false;  // true when components past M vanish identically

  unsigned truncation() const { return components.empty() ? 0 : static_cast<unsigned>(components.size() - 1); }

  void validate() const {
    for (std::size_t m = 0; m < components.size(); ++m) {
      const auto& f = components[m];
      if (f.dim() != dim) throw DimensionMismatch(dim, f.dim());
      if (!f.is_zero() && (!f.is_homogeneous() || *f.degree() != m))
        throw std::invalid_argument("series component " + std::to_string(m) + " is not homogeneous of degree " +
                                    std::to_string(m));
    }
  }

  std::size_t nonzero_count() const {
    std::size_t count = 0;
    for (const auto& f : components) count += f.is_zero() ? 0 : 1;
    return count;
  }
};

/// Homogeneous pieces of a polynomial, as a finite series.
inline HomogeneousSeries series_from_polynomial(const Polynomial& f) {
  HomogeneousSeries s{f.dim(), homogeneous_decompose(f).components, "polynomial", true};
  if (s.components.empty()) s.components.emplace_back(f.dim());
  return s;
}

/// f_m = (c·x_d)^m / (m!)², an entire function of order 1/2. `var` is zero-based.
inline HomogeneousSeries powfact2_family(std::size_t dim, unsigned truncation, const Rational& c = 1, std::size_t var = 0) {
  if (var >= dim) throw std::invalid_argument("powfact2 variable index out of range");
  HomogeneousSeries s{dim, {}, "powfact2:c=" + to_string(c) + ",d=" + std::to_string(var + 1), false};
  for (unsigned m = 0; m <= truncation; ++m) {
    MultiIndex alpha(dim, 0);
    alpha[var] = m;
    const Integer fact = factorial(m);
    s.components.push_back(Polynomial::monomial(std::move(alpha), pow(c, m) / Rational(fact * fact)));
  }
  return s;
}

/// Re (x₁ + i x₂)^m: harmonic, homogeneous of degree m, sup-norm 1 on the sphere.
inline Polynomial harmonic_power(std::size_t dim, unsigned m) {
  Polynomial h(dim);
  for (unsigned k = 0; k <= m; k += 2) {
    MultiIndex alpha(dim, 0);
    alpha[0] = m - k;
    alpha[1] = k;
    Rational coeff(binomial(m, k));
    if ((k / 2) % 2 == 1) coeff = -coeff;
    h.add_term(std::move(alpha), coeff);
  }
  return h;
}

/// f_m = c^m·Re (x₁ + i x₂)^m: radius of convergence exactly 1/|c|.
inline HomogeneousSeries geom_family(std::size_t dim, unsigned truncation, const Rational& c) {
  if (dim < 2) throw std::invalid_argument("geom family needs at least two variables");
  HomogeneousSeries s{dim, {}, "geom:c=" + to_string(c), false};
  for (unsigned m = 0; m <= truncation; ++m) s.components.push_back(harmonic_power(dim, m) * pow(c, m));
  return s;
}

/// Reads `f_<m>.poly` files from a directory; missing degrees are zero.
inline HomogeneousSeries file_family(std::size_t dim, unsigned truncation, const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument("series directory '" + dir + "' does not exist");
  HomogeneousSeries s{dim, std::vector<Polynomial>(truncation + 1, Polynomial(dim)), "file:" + dir, true};
  const std::regex name_re(R"(f_(\d+)\.poly)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, match, name_re)) continue;
    const auto m = static_cast<unsigned>(std::stoul(match[1].str()));
    if (m > truncation) {
      s.is_polynomial = false;
      continue;
    }
    auto f = load_polynomial(entry.path().string());
    if (f.dim() != dim) throw DimensionMismatch(dim, f.dim());
    s.components[m] = std::move(f);
  }
  s.validate();
  return s;
}

/// Family spec: `powfact2:c=<r>,d=<k>`, `geom:c=<r>`, or `file:<dir>`.
inline HomogeneousSeries make_family(const std::string& spec, std::size_t dim, unsigned truncation) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "file") return file_family(dim, truncation, params);
  std::map<std::string, std::string> kv;
  std::stringstream ss(params);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("family parameter '" + item + "' is not key=value");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto take_rational = [&](const std::string& key, const Rational& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    auto r = parse_rational(it->second);
    if (!r) throw std::invalid_argument("family parameter " + key + " is not a rational");
    kv.erase(it);
    return *r;
  };
  if (name == "powfact2") {
    const Rational c = take_rational("c", 1);
    const Rational d = take_rational("d", 1);
    if (d.get_den() != 1 || d < 1) throw std::invalid_argument("powfact2 parameter d must be a variable index >= 1");
    if (!kv.empty()) throw std::invalid_argument("unknown powfact2 parameter '" + kv.begin()->first + "'");
    return powfact2_family(dim, truncation, c, d.get_num().get_ui() - 1);
  }
  if (name == "geom") {
    const Rational c = take_rational("c", 1);
    if (!kv.empty()) throw std::invalid_argument("unknown geom parameter '" + kv.begin()->first + "'");
    return geom_family(dim, truncation, c);
  }
  throw std::invalid_argument("unknown family '" + name + "' (expected powfact2, geom or file)");
}

struct SeriesSolution {
  DomainSpec domain;
  unsigned truncation = 0;
  std::vector<Polynomial> per_degree;             // u_m
  std::vector<DirichletCertificate> certificates;  // certificate of u_m
  std::vector<Polynomial> U;                      // U_j = Σ_{m≥j} u_{m,j}

  Polynomial total() const {
    Polynomial sum(domain.dim);
    for (const auto& u : U) sum += u;
    return sum;
  }
};

/// u_m = solve_dirichlet_poly(domain, f_m) for m ≤ M, regrouped by output degree.
inline SeriesSolution series_solve(const DomainSpec& domain, const HomogeneousSeries& data, unsigned threads = 1) {
  if (data.dim != domain.dim) throw DimensionMismatch(domain.dim, data.dim);
  data.validate();
  const unsigned M = data.truncation();
  SeriesSolution out{domain, M, {}, {}, {}};
  out.per_degree.assign(M + 1, Polynomial(domain.dim));
  out.certificates.assign(M + 1, DirichletCertificate{Polynomial(domain.dim), Polynomial(domain.dim), 0, 0});
  FischerSolver solver(domain);
  // Largest degrees are the most expensive; start them first.
  parallel_for(M + 1, threads, [&](std::size_t i) {
    const std::size_t m = M - i;
    auto sol = solver.solve(data.components[m]);
    out.per_degree[m] = std::move(sol.u);
    out.certificates[m] = std::move(sol.certificate);
  });
  out.U.assign(M + 1, Polynomial(domain.dim));
  for (unsigned m = 0; m <= M; ++m)
    for (const auto& [alpha, c] : out.per_degree[m].terms()) out.U[total_degree(alpha)].add_term(alpha, c);
  return out;
}

struct ConvergenceConfig {
  double tol = 1e-9;
  double entirety_threshold = 0.05;
  double window_fraction = 0.5;  // upper part of the available degrees
};

struct ConvergenceDiagnostic {
  std::vector<double> r;  // r[j] = sphere_max(U_j)^{1/j}; r[0] unused (0)
  unsigned window_lo = 0;
  unsigned window_hi = 0;
  double tail_max = 0.0;
  double radius_estimate = std::numeric_limits<double>::infinity();
  bool entire = true;
  double threshold = 0.05;
};

/// Root test on homogeneous components (index = degree).
inline ConvergenceDiagnostic convergence_diagnostic(const std::vector<Polynomial>& components, const ConvergenceConfig& cfg = {}) {
  if (components.empty()) throw std::invalid_argument("convergence diagnostic needs at least one component");
  ConvergenceDiagnostic d;
  d.threshold = cfg.entirety_threshold;
  const auto J = static_cast<unsigned>(components.size() - 1);
  d.r.assign(J + 1, 0.0);
  SphereMaxConfig smc;
  smc.tol = cfg.tol;
  for (unsigned j = 1; j <= J; ++j)
    if (!components[j].is_zero()) d.r[j] = std::exp(log_sphere_max(components[j], smc) / j);
  d.window_hi = J;
  d.window_lo = std::max(1u, static_cast<unsigned>(std::ceil(J * (1.0 - cfg.window_fraction))));
  if (J == 0) d.window_lo = 0;
  for (unsigned j = std::max(1u, d.window_lo); j <= J; ++j) d.tail_max = std::max(d.tail_max, d.r[j]);
  d.entire = d.tail_max < cfg.entirety_threshold;
  d.radius_estimate = d.entire ? std::numeric_limits<double>::infinity() : 1.0 / d.tail_max;
  return d;
}

inline ConvergenceDiagnostic convergence_diagnostic(const SeriesSolution& sol, const ConvergenceConfig& cfg = {}) {
  return convergence_diagnostic(sol.U, cfg);
}

inline ConvergenceDiagnostic convergence_diagnostic(const HomogeneousSeries& data, const ConvergenceConfig& cfg = {}) {
  return convergence_diagnostic(data.components, cfg);
}

}  // namespace cylharm
