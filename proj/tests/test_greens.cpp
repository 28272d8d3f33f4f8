#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deltalab/greens.hpp"

using namespace deltalab;

namespace {
constexpr double kPi = std::numbers::pi;

// Independent closed forms of the first modified spherical Bessel pair.
double i1(double x) { return (x * std::cosh(x) - std::sinh(x)) / (x * x); }
double k1(double x) { return std::exp(-x) * (x + 1.0) / (x * x); }
}  // namespace

TEST_CASE("free_gamma") {
  CHECK(free_gamma(SpectralPoint(1e-16), 1.0) == doctest::Approx(1.0 / (4.0 * kPi)));
  CHECK(free_gamma(SpectralPoint(1.0), 1.0) ==
        doctest::Approx(std::exp(-1.0) / (4.0 * kPi)).epsilon(1e-15));
  CHECK(free_gamma(SpectralPoint(4.0), 0.5) ==
        doctest::Approx(std::exp(-1.0) / (2.0 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(free_gamma(SpectralPoint(1.0), 0.0), ParameterError);
  CHECK_THROWS_AS(SpectralPoint(0.0), ParameterError);
}

TEST_CASE("Dirichlet correction matches the closed form") {
  const BallDomain ball(10.0, BoundaryCondition::dirichlet());
  const CorrectionL0 h = correction_l0(ball, SpectralPoint(1.0));
  const double expected = -std::exp(-10.0) / (4.0 * kPi * std::sinh(10.0));
  CHECK(h.at_origin() == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("boundary residual vanishes across the test matrix") {
  const BoundaryCondition bcs[] = {BoundaryCondition::dirichlet(), BoundaryCondition::neumann(),
                                   BoundaryCondition::robin(1.0), BoundaryCondition::robin(-1.0)};
  for (const auto& bc : bcs)
    for (double R : {2.0, 5.0, 10.0})
      for (double z : {0.5, 1.0, 4.0}) {
        const BallDomain ball(R, bc);
        const SpectralPoint sz(z);
        CHECK(std::abs(boundary_residual(ball, sz, correction_l0(ball, sz))) < 1e-10);
      }
}

TEST_CASE("h_z(0) decays like exp(-2 kappa R)") {
  const SpectralPoint z(1.0);
  for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::robin(1.0)}) {
    const double h5 = std::abs(correction_l0(BallDomain(5.0, bc), z).at_origin());
    const double h10 = std::abs(correction_l0(BallDomain(10.0, bc), z).at_origin());
    // doubling R squares the exponential factor
    CHECK(h10 / h5 == doctest::Approx(std::exp(-10.0)).epsilon(0.05));
  }
}

TEST_CASE("reduced and three-dimensional boundary solves agree") {
  for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann(),
                         BoundaryCondition::robin(2.5), BoundaryCondition::robin(-0.5)}) {
    const BallDomain ball(3.0, bc);
    const SpectralPoint z(2.0);
    // r' -> 0 limit of the reduced kernel: g(r, s) / (4 pi r s) -> Gamma + h
    for (double r : {0.3, 1.0, 2.5}) {
      const double s = 1e-7;
      CHECK(green_value(ball, z, 0, r, s) ==
            doctest::Approx(point_green(ball, z, r)).epsilon(1e-6));
    }
  }
}

TEST_CASE("l = 0 kernel is symmetric and solves the Dirichlet problem for f = 1") {
  const double R = 2.0, kappa = 1.5;
  const BallDomain ball(R, BoundaryCondition::dirichlet());
  const SpectralPoint z(kappa * kappa);
  const RadialGrid g = build_graded_grid(10, 12, R, 0.05);
  const KernelOperator G = green_kernel_l0(ball, z, g);
  CHECK((G.matrix - G.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  // (-Delta + z) psi = 1, psi(R) = 0: psi = (1 - R sinh(kappa r) / (r sinh(kappa R))) / z
  const Eigen::VectorXd psi = G.apply(Eigen::VectorXd::Ones(g.size()));
  double err = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = g.nodes()(i);
    const double exact = (1.0 - R * std::sinh(kappa * r) / (r * std::sinh(kappa * R))) / z.z();
    err = std::max(err, std::abs(psi(i) - exact));
    scale = std::max(scale, std::abs(exact));
  }
  CHECK(err / scale < 1e-8);
}

TEST_CASE("l = 1 Dirichlet kernel against i1/k1 closed forms") {
  const double R = 3.0, kappa = 0.8;
  const BallDomain ball(R, BoundaryCondition::dirichlet());
  const SpectralPoint z(kappa * kappa);
  const SemiSeparableKernel k = sector_green(ball, z, 1);
  // g(r, s) = kappa r s i1(kappa r<) [k1(kappa r>) - k1(kappa R)/i1(kappa R) i1(kappa r>)]
  for (double r : {0.2, 1.0, 2.9})
    for (double s : {0.5, 1.7}) {
      const double lo = std::min(r, s), hi = std::max(r, s);
      const double exact = kappa * r * s * i1(kappa * lo) *
                           (k1(kappa * hi) - k1(kappa * R) / i1(kappa * R) * i1(kappa * hi));
      CHECK(k(r, s) == doctest::Approx(exact).epsilon(1e-8));
    }
  const RadialGrid g = build_graded_grid(8, 10, R, 0.1);
  const KernelOperator G = green_kernel_l(ball, z, g, 1);
  CHECK((G.matrix - G.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sector quadratic forms are positive") {
  const RadialGrid g = build_graded_grid(8, 8, 4.0, 0.1);
  for (int l : {0, 1, 2})
    for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::neumann()}) {
      const KernelOperator G = green_kernel_l(BallDomain(4.0, bc), SpectralPoint(0.5), g, l);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G.matrix);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  const KernelOperator F = green_kernel_l(FreeSpace{}, SpectralPoint(0.5), g, 1);
  const Eigen::VectorXd f = g.nodes().array().sin().matrix();
  CHECK(g.inner(f, F.apply(f)) > 0.0);
}

TEST_CASE("green kernels reject grids outside the ball") {
  const RadialGrid g = build_graded_grid(4, 6, 3.0, 0.1);
  CHECK_THROWS_AS(green_kernel_l0(BallDomain(2.0, BoundaryCondition::dirichlet()),
                                  SpectralPoint(1.0), g),
                  ParameterError);
}

TEST_CASE("point-interaction coefficients") {
  const SpectralPoint z(1.0);
  const BallDomain ball(10.0, BoundaryCondition::dirichlet());
  CHECK(c_alpha(ball, z, PointInteractionStrength::infinity()) == 0.0);
  CHECK(d_alpha(z, PointInteractionStrength::infinity()) == 0.0);
  CHECK(d_alpha(z, PointInteractionStrength(0.0)) == doctest::Approx(4.0 * kPi));
  CHECK_THROWS_AS(d_alpha(z, PointInteractionStrength(-1.0 / (4.0 * kPi))), PoleError);

  const double expected =
      1.0 / (1.0 / (4.0 * kPi) + std::exp(-10.0) / (4.0 * kPi * std::sinh(10.0)));
  CHECK(c_alpha(ball, z, PointInteractionStrength(0.0)) == doctest::Approx(expected).epsilon(1e-13));

  const PointInteractionStrength a(0.3);
  const double far = c_alpha(BallDomain(40.0, BoundaryCondition::robin(1.0)), z, a);
  CHECK(far == doctest::Approx(d_alpha(z, a)).epsilon(1e-14));
}

TEST_CASE("Robin b < 0: negative boundary eigenvalue and singular correction") {
  const BallDomain ball(2.0, BoundaryCondition::robin(-1.0));
  const auto e = negative_boundary_eigenvalue(ball);
  REQUIRE(e);
  const double x = std::sqrt(-*e) * 2.0;
  CHECK(x / std::tanh(x) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(admissible_z_floor(ball) == doctest::Approx(-*e));
  CHECK_THROWS_AS(correction_l0(ball, SpectralPoint(-*e)), SingularCorrectionError);
  CHECK_FALSE(negative_boundary_eigenvalue(BallDomain(2.0, BoundaryCondition::neumann())));
  CHECK(admissible_z_floor(FreeSpace{}) == 0.0);
}
