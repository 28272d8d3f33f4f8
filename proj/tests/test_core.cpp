#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deltalab/grid.hpp"
#include "deltalab/potential.hpp"
#include "deltalab/quadrature.hpp"
#include "deltalab/serialize.hpp"

using namespace deltalab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Gauss-Legendre rules integrate polynomials of degree 2n-1") {
  for (int n : {1, 2, 5, 12, 24}) {
    const GaussRule g = gauss_legendre(n, 0.0, 2.0);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < g.nodes.size(); ++i)
        sum += g.weights(i) * std::pow(g.nodes(i), d);
      CHECK(sum == doctest::Approx(std::pow(2.0, d + 1) / (d + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ParameterError);
}

TEST_CASE("graded grid sums reproduce radial moments") {
  const RadialGrid g = build_graded_grid(8, 10, 1.0, 0.01);
  CHECK(g.weights().sum() == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
  const Eigen::VectorXd r2 = g.nodes().array().square();
  CHECK(g.integrate(r2) == doctest::Approx(4.0 * kPi / 5.0).epsilon(1e-12));
  CHECK(g.nodes().minCoeff() > 0.0);
  CHECK(g.weights().minCoeff() > 0.0);
  for (Eigen::Index i = 1; i < g.size(); ++i) CHECK(g.nodes()(i) > g.nodes()(i - 1));
  CHECK(g.breaks()[1] == doctest::Approx(0.01));
}

TEST_CASE("exp(-r) moment converges under refinement") {
  // int_0^1 e^{-r} 4 pi r^2 dr = 4 pi (2 - 5/e)
  const double exact = 4.0 * kPi * (2.0 - 5.0 / std::exp(1.0));
  double previous = 0.0;
  for (int p = 2; p <= 16; p *= 2) {
    const RadialGrid g = build_graded_grid(4, p, 1.0, 0.25);
    const double value = g.integrate(g.nodes().array().unaryExpr([](double r) {
      return std::exp(-r);
    }).matrix());
    if (p >= 8) CHECK(std::abs(value - previous) < 1e-10);
    previous = value;
  }
  CHECK(previous == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("grid construction rejects invalid sizes") {
  CHECK_THROWS_AS(build_graded_grid(0, 8, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(build_graded_grid(4, 1, 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS(build_graded_grid(4, 8, 1.0, 2.0), ParameterError);
  CHECK_THROWS_AS(build_graded_grid(4, 8, 1.0, 0.0), ParameterError);
}

TEST_CASE("panel interpolation is exact on polynomials of the panel order") {
  const RadialGrid g = build_graded_grid(5, 8, 2.0, 0.1);
  const Eigen::VectorXd f = g.nodes().array().unaryExpr([](double r) {
    return 1.0 - 2.0 * r + std::pow(r, 7);
  });
  for (double r : {0.003, 0.1, 0.77, 1.5, 2.0})
    CHECK(g.interpolate(f, r) == doctest::Approx(1.0 - 2.0 * r + std::pow(r, 7)).epsilon(1e-12));
}

TEST_CASE("extend_grid keeps the original panels") {
  const RadialGrid g = build_graded_grid(4, 6, 1.0, 0.1);
  const RadialGrid e = extend_grid(g, 3.0, 3);
  CHECK(e.r_max() == doctest::Approx(3.0));
  CHECK((e.nodes().head(g.size()) - g.nodes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scale_potential follows the eps-family") {
  const RadialPotential V = RadialPotential::square_well(-2.0, 1.0);
  ScalingFamily identity{V, 0.0, {1.0}};
  CHECK(scale_potential(identity, 1.0) == V);

  ScalingFamily half{V, 0.0, {0.5}};
  const RadialPotential Vh = scale_potential(half, 0.5);
  CHECK(Vh(0.2) == doctest::Approx(-8.0));
  CHECK(Vh.support() == doctest::Approx(0.5));
  CHECK(Vh(0.6) == 0.0);

  ScalingFamily lam{V, 1.0, {0.1}};
  CHECK(scale_potential(lam, 0.1)(0.01) / V(0.1) == doctest::Approx(110.0));

  const Region ball = BallDomain(0.5, BoundaryCondition::dirichlet());
  CHECK_THROWS_AS(scale_potential(identity, 1.0, ball), SupportError);
  CHECK_THROWS_AS(scale_potential(identity, 0.0), ParameterError);
}

TEST_CASE("int V_eps = (1 + lambda eps) eps int V") {
  const RadialPotential V(TruncatedGaussian{-1, 0.4}, 1.0, 3.0);
  const double lambda = 0.7;
  ScalingFamily fam{V, lambda, {}};
  for (double eps : {0.5, 0.1, 0.02}) {
    const RadialPotential Ve = scale_potential(fam, eps);
    const RadialGrid g(support_breaks(Ve.support(), 6, 4, 2.0), 14);
    CHECK(g.integrate(Ve.sample(g)) ==
          doctest::Approx((1.0 + lambda * eps) * eps * V.integral()).epsilon(1e-10));
  }
}

TEST_CASE("split_uv reconstructs V") {
  const RadialGrid g(support_breaks(1.0, 4, 4, 2.0), 10);
  const RadialPotential well = RadialPotential::square_well(-3.0, 1.0);
  auto [u, v] = split_uv(well, g);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.nodes()(i) < 1.0) {
      CHECK(u(i) == doctest::Approx(-std::sqrt(3.0)));
      CHECK(v(i) == doctest::Approx(std::sqrt(3.0)));
    } else {
      CHECK(u(i) == 0.0);
    }
  }
  const RadialPotential bump = RadialPotential::square_well(2.0, 1.0);
  auto [ub, vb] = split_uv(bump, g);
  CHECK((ub - vb).cwiseAbs().maxCoeff() == 0.0);

  const RadialPotential mixed(Tabulated{{0.0, 0.5, 1.0}, {-2.0, 1.5, 0.0}}, 1.0, 1.0);
  auto [um, vm] = split_uv(mixed, g);
  const Eigen::VectorXd values = mixed.sample(g);
  CHECK((um.cwiseProduct(vm) - values).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_FALSE(mixed.sign_definite());
}

TEST_CASE("uniform ball density normalizes to 3/(4 pi)") {
  const RadialPotential rho = normalize_density(RadialPotential(SquareWell{1}, 1.0, 1.0));
  CHECK(rho(0.3) == doctest::Approx(3.0 / (4.0 * kPi)).epsilon(1e-14));
  const RadialPotential d = dilate_density(rho, 0.1);
  CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.support() == doctest::Approx(0.1));
}

TEST_CASE("potentials and grids round-trip through JSON") {
  const RadialPotential V(TruncatedGaussian{-1, 0.3}, 1.2, 2.5, 0.5);
  CHECK(potential_from_json(to_json(V)) == V);
  const RadialPotential T(Tabulated{{0.0, 1.0}, {1.0, 2.0}}, 1.0, 1.0);
  CHECK(potential_from_json(to_json(T)) == T);
  const RadialGrid g = build_graded_grid(5, 7, 3.0, 0.1);
  CHECK(grid_from_json(to_json(g)) == g);
  json broken = to_json(g);
  broken["nodes"][0] = 0.5;
  CHECK_THROWS_AS(grid_from_json(broken), ParameterError);
}
