#include "cylharm/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cylharm;

namespace {

// Independent J₀ oracle: Simpson quadrature of (1/π)∫₀^π cos(x sin θ) dθ.
double j0_integral(double x) {
  const int n = 4000;
  const double h = std::numbers::pi / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    s += w * std::cos(x * std::sin(i * h));
  }
  return s * h / 3 / std::numbers::pi;
}

double j0_root_oracle() {
  double lo = 2.0, hi = 3.0;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (j0_integral(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Bessel, SeriesMatchesIntegral) {
  for (double x : {0.0, 0.5, 1.0, 2.4, 3.7, 6.0}) EXPECT_NEAR(static_cast<double>(bessel_j0(x)), j0_integral(x), 1e-12) << x;
}

TEST(DiskLambda, UnitDisk) {
  const double j01 = j0_root_oracle();
  EXPECT_NEAR(disk_lambda(1.0), j01 * j01, 1e-9);
  EXPECT_NEAR(disk_lambda(1.0), 5.783185962947, 1e-9);
  EXPECT_LT(std::fabs(static_cast<double>(bessel_j0(std::sqrt(disk_lambda(1.0))))), 1e-10);
}

TEST(DiskLambda, ScalingLaw) {
  const double ref = disk_lambda(1.0);
  for (double a : {0.5, 1.0, 2.0, 5.0}) EXPECT_NEAR(disk_lambda(a) * a * a, ref, 1e-10 * ref) << a;
  EXPECT_NEAR(disk_lambda(2.0), ref / 4, 1e-12);
}

TEST(FdEigen, DiskWithinOnePercent) {
  const auto r = fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 257);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.lambda, disk_lambda(1.0), 0.01 * disk_lambda(1.0));
  EXPECT_LT(r.residual, 1e-6 * r.lambda);
}

TEST(FdEigen, EllipseBetweenDisks) {
  const auto r = fd_dirichlet_eigen(BaseDomain{{2.0, 1.0}}, 129);
  EXPECT_GT(r.lambda, disk_lambda(2.0));
  EXPECT_LT(r.lambda, disk_lambda(1.0));
}

TEST(FdEigen, DomainMonotonicity) {
  const double axes[3] = {0.8, 1.0, 1.3};
  double lam[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lam[i][j] = fd_dirichlet_eigen(BaseDomain{{axes[i], axes[j]}}, 97).lambda;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i + 1 < 3) EXPECT_GT(lam[i][j], lam[i + 1][j]) << i << "," << j;
      if (j + 1 < 3) EXPECT_GT(lam[i][j], lam[i][j + 1]) << i << "," << j;
    }
}

TEST(FdEigen, PositiveAndMaskedEigenfunction) {
  const BaseDomain base{{1.5, 1.0}};
  const auto r = fd_dirichlet_eigen(base, 65);
  double vmax = 0.0;
  for (std::size_t j = 0; j < r.mesh.ny; ++j)
    for (std::size_t i = 0; i < r.mesh.nx; ++i) {
      const double v = r.psi[r.mesh.index(i, j)];
      if (base.contains(r.mesh.x(i), r.mesh.y(j))) EXPECT_GE(v, 0.0);
      else EXPECT_EQ(v, 0.0);
      vmax = std::max(vmax, std::fabs(v));
    }
  EXPECT_DOUBLE_EQ(vmax, 1.0);
}

TEST(FdEigen, Deterministic) {
  const auto a = fd_dirichlet_eigen(BaseDomain{{1.0, 0.7}}, 65), b = fd_dirichlet_eigen(BaseDomain{{1.0, 0.7}}, 65);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.psi, b.psi);
}

TEST(FdEigen, RejectsSmallGridAndBadAxes) {
  EXPECT_THROW(fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 17), std::invalid_argument);
  EXPECT_THROW(fd_dirichlet_eigen(BaseDomain{{1.0, -1.0}}, 65), std::invalid_argument);
}

TEST(FdEigen, ConvergesUnderRefinement) {
  // Masked staircase boundary: the eigenvalue error is first order in h
  // (about 2x per halving), below the interior stencil's second order.
  const double exact = disk_lambda(1.0);
  std::vector<double> err;
  for (std::size_t N : {129u, 257u, 513u}) err.push_back(std::fabs(fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, N).lambda - exact));
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double order = std::log2(err[i] / err[i + 1]);
    EXPECT_GE(order, 0.8) << i;
    EXPECT_LE(order, 2.4) << i;
  }
}

TEST(NullSolution, SliceAndBoundary) {
  const auto eig = fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 65);
  const auto s = null_solution_sample(eig, 1.0);
  const std::size_t mid = static_cast<std::size_t>(s.kz);
  EXPECT_DOUBLE_EQ(s.z(mid), 0.0);
  for (std::size_t j = 0; j < s.mesh.ny; ++j)
    for (std::size_t i = 0; i < s.mesh.nx; ++i) EXPECT_EQ(s.at(i, j, mid), eig.psi[s.mesh.index(i, j)]);
  const BaseDomain base{{1.0, 1.0}};
  for (std::size_t k = 0; k < s.nz; ++k)
    for (std::size_t j = 0; j < s.mesh.ny; ++j)
      for (std::size_t i = 0; i < s.mesh.nx; ++i)
        if (!base.contains(s.mesh.x(i), s.mesh.y(j))) EXPECT_EQ(s.at(i, j, k), 0.0);
}

TEST(NullSolution, ExponentialGrowthPerStep) {
  const auto eig = fd_dirichlet_eigen(BaseDomain{{1.0, 0.8}}, 65);
  const auto s = null_solution_sample(eig, 1.0);
  const double factor = std::exp(std::sqrt(s.lambda) * s.h);
  for (std::size_t k = 0; k + 1 < s.nz; ++k) EXPECT_NEAR(s.slice_max(k + 1) / s.slice_max(k), factor, 1e-6 * factor);
}

TEST(NullSolution, SecondOrderResidual) {
  const auto r1 = null_solution_residual(null_solution_sample(fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 129), 1.0));
  const auto r2 = null_solution_residual(null_solution_sample(fd_dirichlet_eigen(BaseDomain{{1.0, 1.0}}, 257), 1.0));
  const double order = std::log2(r1 / r2);
  EXPECT_GE(order, 1.6);
  EXPECT_LE(order, 2.4);
}

TEST(GridFile, RoundTrip) {
  const auto s = null_solution_sample(fd_dirichlet_eigen(BaseDomain{{1.0, 0.5}}, 33), 0.5);
  std::stringstream buf;
  write_grid(buf, s);
  const auto t = read_grid(buf);
  EXPECT_EQ(t.mesh.nx, s.mesh.nx);
  EXPECT_EQ(t.mesh.ny, s.mesh.ny);
  EXPECT_EQ(t.nz, s.nz);
  EXPECT_EQ(t.h, s.h);
  EXPECT_EQ(t.L, s.L);
  EXPECT_EQ(t.lambda, s.lambda);
  EXPECT_EQ(t.values, s.values);
}

TEST(GridFile, RejectsBadHeader) {
  std::stringstream buf("not-a-grid\n");
  EXPECT_THROW(read_grid(buf), std::runtime_error);
}

TEST(Growth, InverseFactorialSquaredCertified) {
  const auto rep = growth_condition_certify(powfact2_family(3, 40), disk_lambda(1.0));
  EXPECT_TRUE(rep.certified);
  EXPECT_NEAR(rep.margin, 0.5, 0.05);
}

TEST(Growth, GeometricNotEstablished) {
  const auto rep = growth_condition_certify(geom_family(3, 40, 2), disk_lambda(1.0));
  EXPECT_FALSE(rep.certified);
  EXPECT_NE(rep.reason.find("hypothesis not established"), std::string::npos);
}

TEST(Growth, ConstantDataCertified) {
  const auto rep = growth_condition_certify(series_from_polynomial(Polynomial::constant(3, 4)), 1.0);
  EXPECT_TRUE(rep.certified);
  EXPECT_EQ(rep.rho_hat, 0.0);
}
