#include "cylharm/series.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cylharm;
using cylharm::testing::random_domain;
using cylharm::testing::random_polynomial;

namespace {

HomogeneousSeries single_constant(std::size_t n, const Rational& c, unsigned M) {
  HomogeneousSeries s{n, std::vector<Polynomial>(M + 1, Polynomial(n)), "", false};
  s.components[0] = Polynomial::constant(n, c);
  return s;
}

}  // namespace

TEST(SeriesSolve, ConstantData) {
  const auto d = DomainSpec::unit_cylinder(3);
  const auto sol = series_solve(d, single_constant(3, 5, 4));
  EXPECT_EQ(sol.U[0], Polynomial::constant(3, 5));
  for (unsigned j = 1; j <= 4; ++j) EXPECT_TRUE(sol.U[j].is_zero()) << j;
}

TEST(SeriesSolve, HarmonicDataIsFixed) {
  const auto d = parse_domain("cylinder:n=3:axes2=2,1/3");
  const auto data = geom_family(3, 10, Rational(3, 2));
  const auto sol = series_solve(d, data);
  for (unsigned j = 0; j <= 10; ++j) EXPECT_EQ(sol.U[j], data.components[j]) << j;
  const auto rd = convergence_diagnostic(data), rs = convergence_diagnostic(sol);
  for (unsigned j = 1; j <= 10; ++j) EXPECT_NEAR(rd.r[j], rs.r[j], 2e-9) << j;
}

TEST(SeriesSolve, PowFact2CertificatesAndNonzeroComponents) {
  const auto d = DomainSpec::unit_cylinder(3);
  const auto data = powfact2_family(3, 24);
  const auto sol = series_solve(d, data, 2);
  ASSERT_EQ(sol.certificates.size(), 25u);
  for (unsigned m = 0; m <= 24; ++m) {
    EXPECT_TRUE(sol.certificates[m].holds(d, data.components[m], sol.per_degree[m])) << m;
    EXPECT_FALSE(sol.U[m].is_zero()) << m;
    if (!sol.U[m].is_zero()) EXPECT_TRUE(sol.U[m].is_homogeneous() && *sol.U[m].degree() == m);
  }
}

TEST(SeriesSolve, RegroupingIdentity) {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_domain(rng, trial % 2 ? DomainKind::ellipsoid : DomainKind::cylinder, 3);
    const auto f = random_polynomial(rng, 3, 6);
    const auto sol = series_solve(d, series_from_polynomial(f));
    Polynomial by_degree(3);
    for (const auto& u : sol.per_degree) by_degree += u;
    EXPECT_EQ(sol.total(), by_degree);
    EXPECT_EQ(sol.total(), solve_dirichlet_poly(d, f).u);
  }
}

TEST(SeriesSolve, ThreadCountDoesNotChangeResult) {
  const auto d = DomainSpec::unit_cylinder(3);
  const auto data = powfact2_family(3, 14);
  const auto a = series_solve(d, data, 1), b = series_solve(d, data, 3);
  EXPECT_EQ(a.U, b.U);
}

TEST(SeriesSolve, DimensionMismatch) {
  EXPECT_THROW(series_solve(DomainSpec::unit_cylinder(4), powfact2_family(3, 3)), DimensionMismatch);
}

TEST(Families, PowFact2Coefficients) {
  const auto s = powfact2_family(3, 6, Rational(2), 1);
  MultiIndex a{0, 5, 0};
  EXPECT_EQ(s.components[5].coefficient(a), Rational(1, 450));
  EXPECT_EQ(s.generator_tag, "powfact2:c=2,d=2");
}

TEST(Families, HarmonicPowerIsHarmonicWithUnitNorm) {
  for (unsigned m = 0; m <= 12; ++m) {
    const auto h = harmonic_power(3, m);
    EXPECT_TRUE(laplacian(h).is_zero()) << m;
    EXPECT_NEAR(sphere_max(h), 1.0, 1e-9) << m;
  }
}

TEST(Families, MakeFamilyParsesSpecs) {
  EXPECT_EQ(make_family("powfact2:c=1/2,d=3", 3, 4).generator_tag, "powfact2:c=1/2,d=3");
  EXPECT_EQ(make_family("geom:c=2", 3, 4).components[3], harmonic_power(3, 3) * Rational(8));
  EXPECT_THROW(make_family("bogus:c=1", 3, 4), std::invalid_argument);
  EXPECT_THROW(make_family("powfact2:q=1", 3, 4), std::invalid_argument);
  EXPECT_THROW(make_family("powfact2:d=0", 3, 4), std::invalid_argument);
  EXPECT_THROW(make_family("file:/nonexistent/dir", 3, 4), std::invalid_argument);
}

TEST(Families, FileFamilyReadsDegreeFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "cylharm_series_files";
  std::filesystem::create_directories(dir);
  save_polynomial((dir / "f_2.poly").string(), harmonic_power(3, 2));
  save_polynomial((dir / "f_0.poly").string(), Polynomial::constant(3, 7));
  const auto s = make_family("file:" + dir.string(), 3, 3);
  EXPECT_EQ(s.components[0], Polynomial::constant(3, 7));
  EXPECT_TRUE(s.components[1].is_zero());
  EXPECT_EQ(s.components[2], harmonic_power(3, 2));
  save_polynomial((dir / "f_1.poly").string(), harmonic_power(3, 2));
  EXPECT_THROW(make_family("file:" + dir.string(), 3, 3), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST(Convergence, GeometricBoundaryCases) {
  std::vector<Polynomial> ones, halves;
  for (unsigned j = 0; j <= 20; ++j) {
    ones.push_back(Polynomial::monomial({j, 0, 0}, 1));
    halves.push_back(Polynomial::monomial({j, 0, 0}, Rational(1) / pow(Rational(2), j)));
  }
  const auto a = convergence_diagnostic(ones);
  for (unsigned j = 1; j <= 20; ++j) EXPECT_NEAR(a.r[j], 1.0, 1e-9);
  EXPECT_NEAR(a.radius_estimate, 1.0, 1e-9);
  EXPECT_FALSE(a.entire);
  const auto b = convergence_diagnostic(halves);
  for (unsigned j = 1; j <= 20; ++j) EXPECT_NEAR(b.r[j], 0.5, 1e-9);
  EXPECT_NEAR(b.radius_estimate, 2.0, 1e-8);
}

TEST(Convergence, AllZeroIsEntire) {
  const auto d = convergence_diagnostic(std::vector<Polynomial>(5, Polynomial(3)));
  EXPECT_TRUE(d.entire);
  EXPECT_TRUE(std::isinf(d.radius_estimate));
}

TEST(Convergence, RootTestRecoversGeometricRadius) {
  for (const Rational R : {Rational(1, 2), Rational(1), Rational(2)}) {
    const auto d = convergence_diagnostic(geom_family(3, 40, 1 / R));
    EXPECT_NEAR(d.radius_estimate, R.get_d(), 0.05 * R.get_d());
  }
}

TEST(Convergence, PowFact2SolutionDecreasesStrictly) {
  const auto sol = series_solve(DomainSpec::unit_cylinder(3), powfact2_family(3, 24));
  const auto d = convergence_diagnostic(sol);
  for (unsigned j = 9; j <= 24; ++j) EXPECT_LT(d.r[j], d.r[j - 1]) << j;
  EXPECT_LT(d.r[24], 0.05);
  EXPECT_TRUE(d.entire);
}
