// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
// Exit status is 0 iff every selected criterion passed.

#include "cylharm/bounds.hpp"
#include "cylharm/cli.hpp"
#include "cylharm/fischer.hpp"
#include "cylharm/order_type.hpp"
#include "cylharm/series.hpp"
#include "cylharm/spectral.hpp"
#include "cylharm/wos.hpp"
#include "test_support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

using namespace cylharm;
using cylharm::testing::random_domain;
using cylharm::testing::random_polynomial;

namespace {

// ---- pinned parameters and tolerances ----
constexpr std::uint64_t c1_seed = 0xC1;
constexpr int c1_count = 200;
constexpr unsigned c1_max_degree = 10;
constexpr std::uint64_t c2_seed = 0xC2;
constexpr int c2_configs = 20;
constexpr unsigned c2_max_degree = 12;
constexpr double c4_threshold = 0.05;  // entirety threshold, fixed by the pilot run (r_32 ≈ 3.1e-3)
constexpr double c5_rel_tol = 0.05;
constexpr unsigned c5_truncation = 40;
constexpr double c6_rel_tol = 0.05;
constexpr unsigned c6_top_degree = 200;
constexpr std::uint64_t c7_seed_pilot = 0xC7A;
constexpr std::uint64_t c7_seed_check = 0xC7B;
constexpr int c7_corpus = 100;
constexpr unsigned c7_max_degree = 12;
constexpr double c7_stability = 0.10;
constexpr double c8_threshold = 0.05;
constexpr unsigned c8_by_j = 200;
constexpr double c8_oracle_rel_tol = 1e-12;
constexpr double c9_closed_form = 5.783185962947;
constexpr double c9_closed_tol = 1e-9;
constexpr double c9_fd_rel_tol = 0.01;
constexpr double c10_order_lo = 1.6, c10_order_hi = 2.4;
constexpr std::size_t c11_walks = 100000;
constexpr std::uint64_t c11_seed = 42;
constexpr double c11_rel_tol = 0.10;
constexpr double c11_synthetic_rate = 2.0;
constexpr double c11_synthetic_se = 3.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

// Independent checks: Δu = 0 and p | (u − f) by polynomial division, not the solver's certificate.
bool exact_solution(const DomainSpec& d, const Polynomial& f, const Polynomial& u) {
  if (!laplacian(u).is_zero()) return false;
  return divide_by_defining(d, u - f).second.is_zero();
}

struct Corpus1Item {
  DomainSpec domain;
  Polynomial f;
};

std::vector<Corpus1Item> corpus1() {
  SplitMix64 rng(c1_seed);
  std::vector<Corpus1Item> out;
  for (int i = 0; i < c1_count; ++i) {
    const std::size_t n = i % 2 ? 4 : 3;
    const auto kind = (i / 2) % 2 ? DomainKind::ellipsoid : DomainKind::cylinder;
    auto d = random_domain(rng, kind, n);
    out.push_back({std::move(d), random_polynomial(rng, n, c1_max_degree, 10)});
  }
  return out;
}

// Digest of every solution in the corpus, in corpus order.
std::string corpus1_digest(const std::vector<Corpus1Item>& items, int& exact) {
  std::string all;
  exact = 0;
  for (const auto& it : items) {
    const auto sol = solve_dirichlet_poly(it.domain, it.f);
    exact += exact_solution(it.domain, it.f, sol.u) && sol.certificate.holds(it.domain, it.f, sol.u) ? 1 : 0;
    all += format_polynomial(sol.u);
  }
  return sha256_hex(all);
}

Outcome criterion1() {
  const auto items = corpus1();
  unsigned top = 0;
  for (const auto& it : items) top = std::max(top, it.f.degree().value_or(0));
  int exact = 0;
  corpus1_digest(items, exact);
  return {exact == c1_count, std::to_string(exact) + "/" + std::to_string(c1_count) +
                                 " solutions exact (n in {3,4}, max degree " + std::to_string(top) + ")"};
}

Outcome criterion2() {
  SplitMix64 rng(c2_seed);
  std::size_t blocks = 0, singular = 0;
  for (int cfg = 0; cfg < c2_configs; ++cfg)
    for (const auto kind : {DomainKind::cylinder, DomainKind::ellipsoid}) {
      const std::size_t n = cfg % 2 ? 4 : 3;
      const auto d = random_domain(rng, kind, n);
      for (unsigned k = 0; k <= c2_max_degree; ++k)
        for (const auto& det : homogeneous_block_determinants(d, k)) {
          ++blocks;
          singular += det == 0 ? 1 : 0;
        }
    }
  return {singular == 0, std::to_string(blocks) + " parity blocks, " + std::to_string(singular) + " singular"};
}

Outcome criterion3() {
  const auto d = DomainSpec::unit_cylinder(3);
  const auto f = Polynomial::monomial({2, 0, 0}, 1);
  const auto u = solve_dirichlet_poly(d, f).u;
  const auto expected = (Polynomial::constant(3, 1) + Polynomial::monomial({2, 0, 0}, 1) - Polynomial::monomial({0, 2, 0}, 1)) *
                        Rational(1, 2);
  return {u == expected, "u = " + pretty(u)};
}

struct Criterion4Run {
  bool certs = true;
  bool monotone = true;
  double r_top = 0.0;
  std::string digest;
};

Criterion4Run criterion4_run(unsigned M) {
  const auto d = DomainSpec::unit_cylinder(3);
  const auto data = powfact2_family(3, M);
  const auto sol = series_solve(d, data, default_threads());
  Criterion4Run out;
  std::string all;
  for (unsigned m = 0; m <= M; ++m) {
    out.certs = out.certs && sol.certificates[m].holds(d, data.components[m], sol.per_degree[m]) &&
                exact_solution(d, data.components[m], sol.per_degree[m]);
    all += format_polynomial(sol.U[m]);
  }
  ConvergenceConfig cc;
  cc.entirety_threshold = c4_threshold;
  const auto diag = convergence_diagnostic(sol, cc);
  for (unsigned j = std::max(2u, diag.window_lo); j <= M; ++j) out.monotone = out.monotone && diag.r[j] <= diag.r[j - 1];
  out.r_top = diag.r[M];
  out.digest = sha256_hex(all);
  return out;
}

Outcome criterion4() {
  bool ok = true;
  double prev = std::numeric_limits<double>::infinity();
  std::string detail;
  for (unsigned M : {16u, 24u, 32u}) {
    const auto run = criterion4_run(M);
    ok = ok && run.certs && run.monotone && run.r_top < prev;
    prev = run.r_top;
    detail += "M=" + std::to_string(M) + ": certs " + (run.certs ? "exact" : "FAILED") + ", r_M=" + fmt(run.r_top) +
              (run.monotone ? ", non-increasing" : ", NOT monotone") + "; ";
  }
  ok = ok && prev < c4_threshold;
  return {ok, detail + "threshold " + fmt(c4_threshold)};
}

Outcome criterion5() {
  bool ok = true;
  std::string detail;
  const auto d = DomainSpec::unit_cylinder(3);
  for (const Rational R : {Rational(1, 2), Rational(1), Rational(2)}) {
    const auto data = geom_family(3, c5_truncation, 1 / R);
    const auto sol = series_solve(d, data, default_threads());
    const double est = convergence_diagnostic(sol).radius_estimate;
    const double rel = std::fabs(est - R.get_d()) / R.get_d();
    ok = ok && rel <= c5_rel_tol;
    detail += "R=" + to_string(R) + " -> " + fmt(est) + "; ";
  }
  return {ok, detail + "tolerance " + fmt(c5_rel_tol)};
}

Outcome criterion6() {
  std::map<unsigned, double> fact2, power;
  double lf = 0.0;
  for (unsigned m = 1; m <= c6_top_degree; ++m) {
    lf += std::log(static_cast<double>(m));
    fact2[m] = -2.0 * lf;
    power[m] = -2.0 * m * std::log(static_cast<double>(m));
  }
  const auto a = order_type_from_log_norms(fact2);
  const auto b = order_type_from_log_norms(power);
  auto within = [](double v, double target) { return std::fabs(v - target) <= c6_rel_tol * target; };
  const bool ok = within(a.rho_hat, 0.5) && within(a.type_hat, 2.0) && within(b.rho_hat, 0.5) &&
                  within(b.type_hat, 2.0 / std::numbers::e);
  return {ok, "(m!)^-2: rho=" + fmt(a.rho_hat) + " tau=" + fmt(a.type_hat) + "; m^-2m: rho=" + fmt(b.rho_hat) +
                  " tau=" + fmt(b.type_hat) + " (2/e=" + fmt(2.0 / std::numbers::e) + ")"};
}

double corpus7_max_ratio(std::uint64_t seed) {
  SplitMix64 rng(seed);
  double worst = 0.0;
  int built = 0;
  while (built < c7_corpus) {
    const auto d = random_domain(rng, DomainKind::cylinder, 3);
    const auto u = solve_dirichlet_poly(d, random_polynomial(rng, 3, c7_max_degree, 10)).u;
    if (u.degree().value_or(0) == 0) continue;
    worst = std::max(worst, homog_component_bound_check(u).max_ratio);
    ++built;
  }
  return worst;
}

Outcome criterion7() {
  const double pilot = corpus7_max_ratio(c7_seed_pilot);  // frozen calibration constant
  const double check = corpus7_max_ratio(c7_seed_check);
  const bool below = check <= pilot * (1.0 + c7_stability);
  const bool stable = std::fabs(check - pilot) <= c7_stability * pilot;
  return {below && stable, "pilot constant " + fmt(pilot) + ", disjoint corpus max " + fmt(check) + " (band " +
                               fmt(100 * c7_stability) + "%)"};
}

Outcome criterion8() {
  TailBoundParams p;
  p.n = 3;
  p.delta1 = 0.25;
  std::map<unsigned, long double> bound;
  for (unsigned j = 2; j <= c8_by_j; ++j) bound[j] = tail_bound(p, {}, j).majorant;
  const auto roots = jth_root_sequence(bound);
  const auto [decreasing, argmax] = decreasing_after_argmax(roots);
  const double at_j = roots.at(c8_by_j);
  // Independent oracle: C‴ j^{n/2} Σ_{m≥j} j^{−δ₁m}, summed term by term.
  double worst_rel = 0.0;
  for (unsigned j : {2u, 16u, 64u, 200u}) {
    const long double r = std::pow(static_cast<long double>(j), -0.25L);
    long double term = std::pow(r, static_cast<long double>(j)), sum = 0.0L;
    while (term > 1e-40L * sum || sum == 0.0L) {
      sum += term;
      term *= r;
    }
    const long double oracle = std::pow(static_cast<long double>(j), 1.5L) * sum;
    worst_rel = std::max(worst_rel, static_cast<double>(std::fabs(bound.at(j) / oracle - 1.0L)));
  }
  const bool below = at_j < c8_threshold;
  return {below && decreasing && worst_rel <= c8_oracle_rel_tol,
          "root at j=" + std::to_string(c8_by_j) + ": " + fmt(at_j) + (below ? " < " : " >= ") + fmt(c8_threshold) +
              "; decreasing past argmax j=" + std::to_string(argmax) + ": " + (decreasing ? "yes" : "no") +
              "; oracle rel. error " + fmt(worst_rel, 3)};
}

double j0_quadrature(double x) {
  const int n = 4000;
  const double h = std::numbers::pi / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += ((i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2)) * std::cos(x * std::sin(i * h));
  return s * h / 3 / std::numbers::pi;
}

Outcome criterion9() {
  double lo = 2.0, hi = 3.0;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (j0_quadrature(mid) > 0 ? lo : hi) = mid;
  }
  const double oracle = 0.25 * (lo + hi) * (lo + hi);
  const double closed = disk_lambda(1.0);
  const double fd = fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 257).lambda;
  const double ell = fd_dirichlet_eigen(BaseDomain{{2.0, 1.0}}, 257).lambda;
  const bool ok = std::fabs(closed - c9_closed_form) <= c9_closed_tol && std::fabs(closed - oracle) <= c9_closed_tol &&
                  std::fabs(fd - closed) <= c9_fd_rel_tol * closed && ell > disk_lambda(2.0) && ell < closed;
  return {ok, "disk_lambda(1)=" + fmt(closed, 13) + " (oracle " + fmt(oracle, 13) + "), FD N=257: " + fmt(fd, 8) +
                  ", ellipse(2,1): " + fmt(ell, 8) + " in (" + fmt(disk_lambda(2.0), 8) + ", " + fmt(closed, 8) + ")"};
}

Outcome criterion10() {
  const double r1 = null_solution_residual(null_solution_sample(fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 129), 1.0));
  const double r2 = null_solution_residual(null_solution_sample(fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 257), 1.0));
  const double order = std::log2(r1 / r2);
  return {order >= c10_order_lo && order <= c10_order_hi,
          "residual " + fmt(r1, 4) + " -> " + fmt(r2, 4) + ", measured order " + fmt(order, 4)};
}

Outcome criterion11() {
  WalkConfig cfg;
  cfg.start = {0.0, 0.0, 0.0};
  cfg.walks = c11_walks;
  cfg.seed = c11_seed;
  cfg.threads = default_threads();
  const auto batch = wos_exit(DomainSpec::unit_cylinder(3), cfg);
  const double lambda = disk_lambda(1.0);
  const auto fit = decay_fit(batch.records, lambda);
  const double rate = std::sqrt(lambda);
  const bool mc_ok = std::fabs(fit.nu_hat - rate) <= c11_rel_tol * rate;

  SplitMix64 rng(c11_seed);
  std::vector<double> synthetic(c11_walks);
  for (auto& v : synthetic) v = -std::log(rng.uniform_open_low()) / c11_synthetic_rate;
  const auto syn = decay_fit(synthetic, c11_synthetic_rate * c11_synthetic_rate);
  const bool syn_ok = std::fabs(syn.nu_hat - c11_synthetic_rate) <= c11_synthetic_se * syn.stderr_;
  return {mc_ok && syn_ok, "nu_hat=" + fmt(fit.nu_hat) + " +- " + fmt(fit.stderr_, 3) + " vs sqrt(lambda)=" + fmt(rate, 10) +
                               " over [" + fmt(fit.t_lo) + ", " + fmt(fit.t_hi) + "], " + std::to_string(batch.discarded) +
                               " discarded; synthetic " + fmt(syn.nu_hat) + " +- " + fmt(syn.stderr_, 3)};
}

// Runs a CLI command line twice (different worker counts) and compares the non-volatile report content.
bool replay_matches(const std::vector<std::string>& command, std::string& note) {
  auto run = [&](const std::string& threads) {
    std::vector<std::string> args = {"--json", "--threads", threads};
    args.insert(args.end(), command.begin(), command.end());
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return std::make_pair(code, Json::parse(out.str()));
  };
  const auto [c1, first] = run("1");
  auto replay_args = first["manifest"]["argv"].get<std::vector<std::string>>();
  const auto [c2, second] = [&] {
    std::vector<std::string> args = {"--json", "--threads", "3"};
    args.insert(args.end(), replay_args.begin(), replay_args.end());
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return std::make_pair(code, Json::parse(out.str()));
  }();
  const bool same = c1 == 0 && c2 == 0 && strip_volatile(first) == strip_volatile(second);
  note += command.front() + (same ? " identical" : " DIFFERS") + "; ";
  return same;
}

Outcome criterion12() {
  std::string note;
  bool ok = true;
  // Criterion 1: the full corpus solved twice, plus CLI replays of a few corpus items.
  const auto items = corpus1();
  int e1 = 0, e2 = 0;
  const bool corpus_same = corpus1_digest(items, e1) == corpus1_digest(items, e2);
  ok = ok && corpus_same;
  note += std::string("corpus-1 digest ") + (corpus_same ? "identical" : "DIFFERS") + "; ";
  const auto dir = std::filesystem::temp_directory_path() / "cylharm_acceptance";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < 3; ++i) {
    const auto path = (dir / ("c1_" + std::to_string(i) + ".poly")).string();
    save_polynomial(path, items[static_cast<std::size_t>(i)].f);
    ok = replay_matches({"poly-solve", "--domain", format_domain(items[static_cast<std::size_t>(i)].domain), "--data", path,
                         "--emit-certificate"},
                        note) && ok;
  }
  // Criterion 4 and 11 workflows through their manifests, with a different worker count.
  ok = replay_matches({"series-solve", "--domain", "cylinder:n=3:axes2=1,1", "--family", "powfact2:c=1,d=1", "--truncate", "32",
                       "--diagnose"},
                      note) && ok;
  ok = replay_matches({"decay-sim", "--base", "1,1", "--walks", std::to_string(c11_walks), "--seed", std::to_string(c11_seed)}, note) && ok;
  std::filesystem::remove_all(dir);
  return {ok, note + "thread counts 1 vs 3"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,  criterion4,
                                                          criterion5, criterion6, criterion7,  criterion8,
                                                          criterion9, criterion10, criterion11, criterion12};
  bool all = true;
  for (int i = 1; i <= 12; ++i) {
    if (only && only != i) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << i << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << fmt(secs, 3) << " s]"
              << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
