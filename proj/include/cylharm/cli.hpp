#pragma once

// `cylharm` command-line front end. Exit codes: 0 success, 1 usage error,
// 2 violated mathematical contract (failed certificate, non-harmonic input,
// non-converged eigensolve, rejected decay fit).

#include "cylharm/bounds.hpp"
#include "cylharm/fischer.hpp"
#include "cylharm/order_type.hpp"
#include "cylharm/poly_io.hpp"
#include "cylharm/report.hpp"
#include "cylharm/series.hpp"
#include "cylharm/spectral.hpp"
#include "cylharm/wos.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace cylharm {

/// Raised for outcomes that break a mathematical contract; maps to exit code 2.
class ContractViolation : public std::runtime_error {
 public:
  ContractViolation(const std::string& what, Json result) : std::runtime_error(what), result_(std::move(result)) {}
  const Json& result() const { return result_; }

 private:
  Json result_;
};

namespace cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_violation = 2;

struct Globals {
  bool json = false;
  std::string report_path;
  unsigned threads = default_threads();
};

/// Arguments that define the computation: everything except output/execution flags.
inline std::vector<std::string> canonical_argv(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--json") continue;
    if (a == "--threads" || a == "--report") {
      ++i;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0 || a.rfind("--report=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument(what + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

inline BaseDomain parse_base(const std::string& text) {
  BaseDomain b{parse_reals(text, "--base")};
  b.validate();
  return b;
}

/// Principal Dirichlet eigenvalue of a two-dimensional base: closed form on disks, FD otherwise.
inline double base_lambda(const BaseDomain& base, std::size_t grid) {
  if (base.is_disk()) return disk_lambda(base.semi_axes[0]);
  return fd_dirichlet_eigen(base, grid).lambda;
}

inline Json polynomial_json(const Polynomial& f) { return format_polynomial(f); }

inline Json certificate_json(const DirichletCertificate& c) {
  Json j;
  j["harmonic_residual"] = pretty(c.residual_laplacian);
  j["boundary_quotient"] = pretty(c.boundary_quotient);
  j["degree"] = c.degree;
  j["basis_size"] = c.basis_size;
  return j;
}

inline std::string certificate_digest(const Polynomial& u, const DirichletCertificate& c) {
  return sha256_hex(format_polynomial(u) + "|" + format_polynomial(c.boundary_quotient) + "|" +
                    format_polynomial(c.residual_laplacian));
}

inline Json log_map_json(const std::map<unsigned, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = json_number(v);
  return j;
}

// ---- subcommands --------------------------------------------------------

struct PolySolveArgs {
  std::string domain, data, out;
  bool emit_certificate = false;
};

inline Json run_poly_solve(const PolySolveArgs& a) {
  const auto domain = parse_domain(a.domain);
  const auto f = load_polynomial(a.data);
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = solve_dirichlet_poly(domain, f);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  Json r;
  r["domain"] = format_domain(domain);
  r["solution"] = polynomial_json(sol.u);
  r["solution_pretty"] = pretty(sol.u);
  r["certificate_valid"] = sol.certificate.holds(domain, f, sol.u);
  r["certificate_digest"] = certificate_digest(sol.u, sol.certificate);
  if (a.emit_certificate) {
    r["certificate"] = certificate_json(sol.certificate);
    r["certificate"]["solve_time_ms"] = ms;
  }
  if (!a.out.empty()) {
    save_polynomial(a.out, sol.u);
    r["out"] = a.out;
  }
  if (!r["certificate_valid"].get<bool>()) throw ContractViolation("certificate failed", r);
  return r;
}

struct SeriesSolveArgs {
  std::string domain, family, out_dir;
  unsigned truncate = 0;
  bool diagnose = false;
  double threshold = 0.05;
};

inline Json order_type_json(const HomogeneousSeries& data, Json& r, double lambda, bool have_lambda) {
  Json ot;
  try {
    const auto est = order_type_estimate(data);
    ot["log_M_m"] = log_map_json(est.log_M);
    ot["M_m"] = log_map_json(est.M_seq);
    ot["rho_seq"] = log_map_json(est.rho_seq);
    ot["type_seq"] = log_map_json(est.type_seq);
    ot["rho_hat"] = est.rho_hat;
    ot["type_hat"] = est.type_hat;
    ot["rho_classical"] = est.rho_classical;
    ot["type_classical"] = est.type_classical;
    ot["window"] = {est.window_lo, est.window_hi};
    ot["stable"] = est.stable;
    ot["rho_upper_window"] = est.rho_upper_window;
    const auto g = growth_condition_certify(est, have_lambda ? lambda : 1.0);
    r["growth_condition"] = {{"certified", g.certified}, {"rho_hat", g.rho_hat}, {"margin", g.margin},
                             {"lambda", have_lambda ? Json(lambda) : Json(nullptr)}, {"reason", g.reason}};
  } catch (const OrderTypeError& e) {
    ot["error"] = e.what();
    const auto g = growth_condition_certify(data, have_lambda ? lambda : 1.0);
    r["growth_condition"] = {{"certified", g.certified}, {"rho_hat", json_number(g.rho_hat)}, {"margin", json_number(g.margin)},
                             {"lambda", have_lambda ? Json(lambda) : Json(nullptr)}, {"reason", g.reason}};
  }
  return ot;
}

inline Json convergence_json(const ConvergenceDiagnostic& d) {
  Json j;
  Json r = Json::object();
  for (std::size_t k = 1; k < d.r.size(); ++k) r[std::to_string(k)] = d.r[k];
  j["r_j"] = r;
  j["window"] = {d.window_lo, d.window_hi};
  j["threshold"] = d.threshold;
  j["tail_max"] = d.tail_max;
  j["radius_estimate"] = json_number(d.radius_estimate);
  bool monotone = true;
  for (unsigned k = std::max(2u, d.window_lo); k <= d.window_hi; ++k) monotone = monotone && d.r[k] <= d.r[k - 1];
  j["non_increasing_on_window"] = monotone;
  j["entire_trend"] = d.entire && monotone;
  return j;
}

inline Json run_series_solve(const SeriesSolveArgs& a, unsigned threads) {
  const auto domain = parse_domain(a.domain);
  const auto data = make_family(a.family, domain.dim, a.truncate);
  const auto sol = series_solve(domain, data, threads);
  Json r;
  r["domain"] = format_domain(domain);
  r["family"] = data.generator_tag;
  r["truncation"] = sol.truncation;
  Json certs = Json::array();
  bool all_exact = true;
  for (unsigned m = 0; m <= sol.truncation; ++m) {
    const bool ok = sol.certificates[m].holds(domain, data.components[m], sol.per_degree[m]);
    all_exact = all_exact && ok;
    certs.push_back({{"m", m}, {"exact", ok}, {"basis_size", sol.certificates[m].basis_size},
                     {"digest", certificate_digest(sol.per_degree[m], sol.certificates[m])}});
  }
  r["certificates"] = certs;
  r["all_certificates_exact"] = all_exact;
  Json u_digests = Json::array();
  for (const auto& u : sol.U) u_digests.push_back(sha256_hex(format_polynomial(u)));
  r["U_digests"] = u_digests;
  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    for (unsigned j = 0; j <= sol.truncation; ++j)
      save_polynomial((std::filesystem::path(a.out_dir) / ("U_" + std::to_string(j) + ".poly")).string(), sol.U[j]);
    r["out_dir"] = a.out_dir;
  }
  if (a.diagnose) {
    ConvergenceConfig cc;
    cc.entirety_threshold = a.threshold;
    const auto d = convergence_diagnostic(sol, cc);
    r["convergence"] = convergence_json(d);
    const bool have_lambda = domain.dim == 3 && domain.axes_squared[0] == domain.axes_squared[1];
    const double lambda = have_lambda ? disk_lambda(std::sqrt(to_double(domain.axes_squared[0]))) : 0.0;
    r["order_type"] = order_type_json(data, r, lambda, have_lambda);
  }
  if (!all_exact) throw ContractViolation("per-degree certificate failed", r);
  return r;
}

struct DiagnoseArgs {
  std::string family, norms, harmonic;
  std::size_t dim = 3;
  unsigned truncate = 0;
  bool tail_bound = false;
  unsigned jmax = 200;
  double delta1 = 0.25, delta2 = 0.25, A = 1.0, lambda = 0.0, threshold = 0.05;
  std::size_t n = 3;
};

inline std::map<unsigned, double> read_log_norms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open norms file '" + path + "'");
  std::map<unsigned, double> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    unsigned m = 0;
    double v = 0.0;
    if (!(ls >> m)) continue;
    std::string extra;
    if (!(ls >> v) || (ls >> extra)) throw std::invalid_argument("norms file line " + std::to_string(lineno) + ": expected '<m> <log M_m>'");
    out[m] = v;
  }
  return out;
}

inline Json run_diagnose(const DiagnoseArgs& a) {
  const int modes = !a.family.empty() + !a.norms.empty() + !a.harmonic.empty() + a.tail_bound;
  if (modes != 1) throw std::invalid_argument("diagnose needs exactly one of --family, --norms, --harmonic, --tail-bound");
  Json r;
  const bool have_lambda = a.lambda > 0;
  if (!a.family.empty()) {
    const auto data = make_family(a.family, a.dim, a.truncate);
    r["mode"] = "family";
    r["family"] = data.generator_tag;
    ConvergenceConfig cc;
    cc.entirety_threshold = a.threshold;
    r["convergence"] = convergence_json(convergence_diagnostic(data, cc));
    r["order_type"] = order_type_json(data, r, a.lambda, have_lambda);
  } else if (!a.norms.empty()) {
    r["mode"] = "norms";
    Json ot;
    try {
      const auto est = order_type_from_log_norms(read_log_norms(a.norms));
      ot["rho_hat"] = est.rho_hat;
      ot["type_hat"] = est.type_hat;
      ot["rho_classical"] = est.rho_classical;
      ot["type_classical"] = est.type_classical;
      ot["window"] = {est.window_lo, est.window_hi};
      ot["stable"] = est.stable;
      ot["rho_seq"] = log_map_json(est.rho_seq);
      ot["type_seq"] = log_map_json(est.type_seq);
      const auto g = growth_condition_certify(est, have_lambda ? a.lambda : 1.0);
      r["growth_condition"] = {{"certified", g.certified}, {"margin", g.margin}, {"reason", g.reason}};
    } catch (const OrderTypeError& e) {
      ot["error"] = e.what();
    }
    r["order_type"] = ot;
  } else if (!a.harmonic.empty()) {
    r["mode"] = "harmonic";
    const auto v = load_polynomial(a.harmonic);
    try {
      const auto rep = homog_component_bound_check(v);
      r["ratios"] = log_map_json(rep.ratios);
      r["max_ratio"] = rep.max_ratio;
      r["argmax"] = rep.argmax;
    } catch (const NotHarmonic& e) {
      r["status"] = "not harmonic";
      r["residual"] = pretty(e.residual());
      throw ContractViolation("not harmonic: Laplacian residual " + pretty(e.residual()), r);
    }
  } else {
    r["mode"] = "tail-bound";
    TailBoundParams p;
    p.n = a.n;
    p.A = a.A;
    p.lambda = have_lambda ? a.lambda : disk_lambda(1.0);
    p.delta1 = a.delta1;
    p.delta2 = a.delta2;
    p.validate();
    std::map<unsigned, long double> bound;
    for (unsigned j = 2; j <= a.jmax; ++j) bound[j] = tail_majorant(p, j);
    const auto roots = jth_root_sequence(bound);
    const auto [decreasing, argmax] = decreasing_after_argmax(roots);
    r["params"] = {{"n", p.n}, {"A", p.A}, {"lambda", p.lambda}, {"B", p.B()}, {"delta1", p.delta1}, {"delta2", p.delta2}};
    Json logs = Json::object();
    for (const auto& [j, b] : bound) logs[std::to_string(j)] = static_cast<double>(std::log(b));
    r["log_majorant"] = logs;
    r["jth_root"] = log_map_json(roots);
    r["argmax"] = argmax;
    r["decreasing_after_argmax"] = decreasing;
    r["threshold"] = a.threshold;
    unsigned first_below = 0;
    for (const auto& [j, v] : roots)
      if (v < a.threshold) {
        first_below = j;
        break;
      }
    r["first_j_below_threshold"] = first_below ? Json(first_below) : Json(nullptr);
  }
  return r;
}

struct EigenArgs {
  std::string base;
  std::size_t grid = 129;
  std::size_t max_outer = 500;
};

inline Json run_eigen(const EigenArgs& a) {
  const auto base = parse_base(a.base);
  EigenConfig cfg;
  cfg.max_outer = a.max_outer;
  Json r;
  r["base"] = base.semi_axes;
  r["grid"] = a.grid;
  EigenResult eig;
  try {
    eig = fd_dirichlet_eigen(base, a.grid, cfg);
  } catch (const EigenNotConverged& e) {
    r["converged"] = false;
    throw ContractViolation(e.what(), r);
  }
  r["lambda"] = eig.lambda;
  r["residual"] = eig.residual;
  r["iterations"] = eig.iterations;
  r["cg_iterations"] = eig.cg_iterations;
  r["converged"] = eig.converged;
  r["h"] = eig.mesh.h;
  r["mesh"] = {eig.mesh.nx, eig.mesh.ny};
  r["psi_digest"] = sha256_hex(std::string(reinterpret_cast<const char*>(eig.psi.data()), eig.psi.size() * sizeof(double)));
  if (base.is_disk()) {
    const double exact = disk_lambda(base.semi_axes[0]);
    r["closed_form"] = exact;
    r["relative_error"] = (eig.lambda - exact) / exact;
  }
  r["config"] = {{"cg_tolerance", cfg.cg_tolerance}, {"max_outer", cfg.max_outer}, {"residual_target", cfg.residual_target}};
  return r;
}

struct NullArgs {
  std::string base, out;
  std::size_t grid = 129;
  double length = 1.0;
};

inline Json run_null_solution(const NullArgs& a) {
  const auto base = parse_base(a.base);
  if (!(a.length > 0)) throw std::invalid_argument("--length must be positive");
  const auto eig = fd_dirichlet_eigen(base, a.grid);
  const auto s = null_solution_sample(eig, a.length);
  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write grid file '" + a.out + "'");
  write_grid(out, s);
  out.close();
  Json r;
  r["base"] = base.semi_axes;
  r["grid"] = a.grid;
  r["lambda"] = s.lambda;
  r["h"] = s.h;
  r["L"] = s.L;
  r["dims"] = {s.mesh.nx, s.mesh.ny, s.nz};
  r["laplacian_residual"] = null_solution_residual(s);
  r["values_digest"] = sha256_hex(std::string(reinterpret_cast<const char*>(s.values.data()), s.values.size() * sizeof(double)));
  r["out"] = a.out;
  return r;
}

struct DecayArgs {
  std::string base = "1,1", start, dump;
  std::size_t walks = 100000, max_steps = 1000000, grid = 129;
  std::uint64_t seed = 42;
  double eps = 1e-6;
};

inline Json run_decay_sim(const DecayArgs& a, unsigned threads) {
  const auto base = parse_base(a.base);
  DomainSpec domain = DomainSpec::cylinder(
      3, {Rational(base.semi_axes[0]) * Rational(base.semi_axes[0]), Rational(base.semi_axes[1]) * Rational(base.semi_axes[1])});
  WalkConfig cfg;
  cfg.start = a.start.empty() ? std::vector<double>{0.0, 0.0, 0.0} : parse_reals(a.start, "--start");
  cfg.eps_shell = a.eps;
  cfg.max_steps = a.max_steps;
  cfg.walks = a.walks;
  cfg.seed = a.seed;
  cfg.threads = threads;
  const auto batch = wos_exit(domain, cfg);
  std::ostringstream dump;
  dump.precision(17);
  for (const auto& rec : batch.records) dump << rec.y_axial << ' ' << rec.y_base_angle << ' ' << rec.steps << '\n';
  if (!a.dump.empty()) {
    std::ofstream out(a.dump);
    if (!out) throw std::runtime_error("cannot write exit dump '" + a.dump + "'");
    out << dump.str();
  }
  const double lambda = base_lambda(base, a.grid);
  const DecayFitConfig fc;
  Json r;
  r["base"] = base.semi_axes;
  r["start"] = cfg.start;
  r["walks"] = cfg.walks;
  r["accepted"] = batch.records.size();
  r["discarded"] = batch.discarded;
  r["records_digest"] = sha256_hex(dump.str());
  r["lambda"] = lambda;
  r["reference_rate"] = std::sqrt(lambda);
  r["fit_rule"] = {{"t_lo", fc.t_lo}, {"dt", fc.dt}, {"exceedance_floor", fc.exceedance_floor},
                   {"min_records", fc.min_records}, {"bootstrap", fc.bootstrap}, {"curvature_threshold", fc.curvature_threshold}};
  try {
    const auto fit = decay_fit(batch.records, lambda, fc);
    r["nu_hat"] = fit.nu_hat;
    r["stderr"] = fit.stderr_;
    r["fit_window"] = {fit.t_lo, fit.t_hi};
    r["relative_deviation"] = (fit.nu_hat - fit.reference_rate) / fit.reference_rate;
    r["curvature"] = fit.curvature;
    r["curvature_ok"] = fit.curvature_ok;
    r["survival"] = {{"dt", fc.dt}, {"values", fit.survival}};
    r["note"] = "consistent with the upper bound; rate match is an empirical finding";
  } catch (const DecayFitError& e) {
    r["error"] = e.what();
    throw ContractViolation(e.what(), r);
  }
  return r;
}

struct VerifyArgs {
  std::string domain, data, solution;
};

inline Json run_verify(const VerifyArgs& a) {
  const auto domain = parse_domain(a.domain);
  const auto f = load_polynomial(a.data);
  const auto u = load_polynomial(a.solution);
  const auto v = verify_solution(domain, f, u);
  Json r;
  r["domain"] = format_domain(domain);
  r["status"] = to_string(v.status);
  if (v.status == VerifyStatus::ok) {
    r["certificate"] = certificate_json(*v.certificate);
    return r;
  }
  if (v.status == VerifyStatus::not_harmonic) r["residual"] = pretty(*v.witness);
  else r["remainder"] = pretty(*v.witness);
  throw ContractViolation(std::string(to_string(v.status)) + ": " + pretty(*v.witness), r);
}

// ---- dispatch -------------------------------------------------------------

inline void emit(const Json& report, const Globals& g, std::ostream& out) {
  if (!g.report_path.empty()) {
    std::ofstream f(g.report_path);
    if (!f) throw std::runtime_error("cannot write report '" + g.report_path + "'");
    f << report.dump(2) << '\n';
  }
  if (g.json) out << report.dump(2) << '\n';
  else render_text(out, report);
}

}  // namespace cli

/// Runs one command line (args excludes the program name) and returns the exit code.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli;
  CLI::App app{"Exact and numerical harmonic analysis on ellipsoidal cylinders", "cylharm"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Globals g;
  app.add_flag("--json", g.json, "machine-readable report on stdout");
  app.add_option("--threads", g.threads, "worker threads (overrides CYLHARM_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--report", g.report_path, "also write the JSON report to this path");

  PolySolveArgs ps;
  auto* c_ps = app.add_subcommand("poly-solve", "solve the Dirichlet problem for polynomial data exactly");
  c_ps->add_option("--domain", ps.domain, "cylinder:n=<n>:axes2=<r,..> or ellipsoid:n=<n>:axes2=<r,..>")->required();
  c_ps->add_option("--data", ps.data, "polynomial file")->required();
  c_ps->add_flag("--emit-certificate", ps.emit_certificate, "include the full exactness certificate");
  c_ps->add_option("--out", ps.out, "write the solution polynomial here");

  SeriesSolveArgs ss;
  auto* c_ss = app.add_subcommand("series-solve", "solve degree by degree for truncated entire data");
  c_ss->add_option("--domain", ss.domain, "domain spec (as for poly-solve)")->required();
  c_ss->add_option("--family", ss.family, "powfact2:c=<r>,d=<k> | geom:c=<r> | file:<dir>")->required();
  c_ss->add_option("--truncate", ss.truncate, "truncation degree M")->required();
  c_ss->add_flag("--diagnose", ss.diagnose, "root test, order/type and growth condition");
  c_ss->add_option("--threshold", ss.threshold, "entirety threshold on r_j")->check(CLI::PositiveNumber);
  c_ss->add_option("--out-dir", ss.out_dir, "write U_<j>.poly files here");

  DiagnoseArgs dg;
  auto* c_dg = app.add_subcommand("diagnose", "analytic diagnostics without solving");
  c_dg->add_option("--family", dg.family, "data family (data-side root test and order/type)");
  c_dg->add_option("--dim", dg.dim, "ambient dimension for --family (default 3)")->check(CLI::Range(2, 32));
  c_dg->add_option("--truncate", dg.truncate, "truncation degree for --family");
  c_dg->add_option("--norms", dg.norms, "file of '<m> <log M_m>' lines (coefficient-sequence mode)");
  c_dg->add_option("--harmonic", dg.harmonic, "harmonic polynomial file (component ratios)");
  c_dg->add_flag("--tail-bound", dg.tail_bound, "tail majorant and its j-th roots");
  c_dg->add_option("--jmax", dg.jmax, "largest j for the tail bound")->check(CLI::Range(2u, 100000u));
  c_dg->add_option("--delta1", dg.delta1, "data decay exponent delta1");
  c_dg->add_option("--delta2", dg.delta2, "data decay exponent delta2");
  c_dg->add_option("--A", dg.A, "data decay constant A");
  c_dg->add_option("--n", dg.n, "ambient dimension for the tail bound")->check(CLI::Range(2, 32));
  c_dg->add_option("--lambda", dg.lambda, "base eigenvalue (default: unit disk)");
  c_dg->add_option("--threshold", dg.threshold, "entirety threshold on r_j")->check(CLI::PositiveNumber);

  EigenArgs eg;
  auto* c_eg = app.add_subcommand("eigen", "principal Dirichlet eigenpair of the base");
  c_eg->add_option("--base", eg.base, "semi-axes a,b")->required();
  c_eg->add_option("--grid", eg.grid, "nodes across the major diameter")->check(CLI::Range(33, 1 << 14));
  c_eg->add_option("--max-outer", eg.max_outer, "inverse-iteration cap")->check(CLI::PositiveNumber);

  NullArgs nl;
  auto* c_nl = app.add_subcommand("null-solution", "sample psi(x')exp(sqrt(lambda) x_n)");
  c_nl->add_option("--base", nl.base, "semi-axes a,b")->required();
  c_nl->add_option("--grid", nl.grid, "nodes across the major diameter")->check(CLI::Range(33, 1 << 14));
  c_nl->add_option("--length", nl.length, "axial extent L of the sample");
  c_nl->add_option("--out", nl.out, "grid file")->required();

  DecayArgs dc;
  auto* c_dc = app.add_subcommand("decay-sim", "walk-on-spheres exits and axial decay fit");
  c_dc->add_option("--base", dc.base, "semi-axes a,b (default 1,1)");
  c_dc->add_option("--walks", dc.walks, "number of walks")->check(CLI::PositiveNumber);
  c_dc->add_option("--seed", dc.seed, "RNG seed");
  c_dc->add_option("--eps", dc.eps, "absorption shell width")->check(CLI::PositiveNumber);
  c_dc->add_option("--max-steps", dc.max_steps, "per-walk step cap (longer walks are discarded)")->check(CLI::PositiveNumber);
  c_dc->add_option("--start", dc.start, "x1,x2,x3");
  c_dc->add_option("--grid", dc.grid, "FD grid for non-circular bases")->check(CLI::Range(33, 1 << 14));
  c_dc->add_option("--dump-exits", dc.dump, "write 'y_n angle steps' per accepted walk");

  VerifyArgs vf;
  auto* c_vf = app.add_subcommand("verify", "check a claimed solution exactly");
  c_vf->add_option("--domain", vf.domain, "domain spec")->required();
  c_vf->add_option("--data", vf.data, "boundary data polynomial file")->required();
  c_vf->add_option("--solution", vf.solution, "claimed solution polynomial file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? exit_ok : exit_usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Json config;
  std::vector<std::uint64_t> seeds;
  const auto t0 = std::chrono::steady_clock::now();
  Json report;
  int code = exit_ok;
  auto finish = [&](Json result, const std::string& status) {
    report["manifest"] = make_manifest(command, canonical_argv(args), config, seeds);
    report["status"] = status;
    report["result"] = std::move(result);
    report["execution"] = {{"threads", g.threads}};
    report["timing"] = {{"elapsed_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()}};
  };
  try {
    Json result;
    if (command == "poly-solve") {
      config = {{"domain", ps.domain}, {"data", ps.data}, {"emit_certificate", ps.emit_certificate}, {"out", ps.out}};
      result = run_poly_solve(ps);
    } else if (command == "series-solve") {
      config = {{"domain", ss.domain}, {"family", ss.family}, {"truncate", ss.truncate}, {"diagnose", ss.diagnose},
                {"threshold", ss.threshold}, {"window_fraction", 0.5}, {"out_dir", ss.out_dir}};
      result = run_series_solve(ss, g.threads);
    } else if (command == "diagnose") {
      config = {{"family", dg.family}, {"dim", dg.dim}, {"truncate", dg.truncate}, {"norms", dg.norms}, {"harmonic", dg.harmonic},
                {"tail_bound", dg.tail_bound}, {"jmax", dg.jmax}, {"delta1", dg.delta1}, {"delta2", dg.delta2}, {"A", dg.A},
                {"n", dg.n}, {"lambda", dg.lambda}, {"threshold", dg.threshold}};
      result = run_diagnose(dg);
    } else if (command == "eigen") {
      config = {{"base", eg.base}, {"grid", eg.grid}, {"max_outer", eg.max_outer}};
      result = run_eigen(eg);
    } else if (command == "null-solution") {
      config = {{"base", nl.base}, {"grid", nl.grid}, {"length", nl.length}, {"out", nl.out}};
      result = run_null_solution(nl);
    } else if (command == "decay-sim") {
      config = {{"base", dc.base}, {"walks", dc.walks}, {"seed", dc.seed}, {"eps", dc.eps}, {"max_steps", dc.max_steps},
                {"start", dc.start}, {"grid", dc.grid}, {"dump_exits", dc.dump}};
      seeds.push_back(dc.seed);
      result = run_decay_sim(dc, g.threads);
    } else {
      config = {{"domain", vf.domain}, {"data", vf.data}, {"solution", vf.solution}};
      result = run_verify(vf);
    }
    finish(std::move(result), "ok");
  } catch (const ContractViolation& e) {
    err << "cylharm " << command << ": " << e.what() << '\n';
    Json result = e.result();
    result["error"] = e.what();
    finish(std::move(result), "violation");
    code = exit_violation;
  } catch (const EigenNotConverged& e) {
    err << "cylharm " << command << ": " << e.what() << '\n';
    finish({{"error", e.what()}}, "violation");
    code = exit_violation;
  } catch (const NotHarmonic& e) {
    err << "cylharm " << command << ": " << e.what() << '\n';
    finish({{"error", e.what()}, {"residual", pretty(e.residual())}}, "violation");
    code = exit_violation;
  } catch (const std::logic_error& e) {
    // Includes invalid_argument: bad domains, axes, family specs, dimension mismatches.
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e) ||
        dynamic_cast<const std::length_error*>(&e)) {
      err << "cylharm " << command << ": " << e.what() << '\n';
      return exit_usage;
    }
    err << "cylharm " << command << ": internal invariant failed: " << e.what() << '\n';
    finish({{"error", e.what()}}, "violation");
    code = exit_violation;
  } catch (const ParseError& e) {
    err << "cylharm " << command << ": parse error at " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "cylharm " << command << ": " << e.what() << '\n';
    return exit_usage;
  }
  try {
    emit(report, g, out);
  } catch (const std::exception& e) {
    err << "cylharm: " << e.what() << '\n';
    return exit_usage;
  }
  return code;
}

inline int dispatch(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return dispatch(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace cylharm
