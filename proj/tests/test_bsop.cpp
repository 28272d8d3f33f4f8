#include <doctest.h>

#include <cmath>
#include <numbers>

#include "deltalab/bsop.hpp"
#include "deltalab/errors.hpp"

using namespace deltalab;

namespace {
constexpr double kPi = std::numbers::pi;

// Zero-energy s-wave matching for the unit well of radius a:
// chi = sin(sqrt(theta) r) must meet the constant exterior chi' = 0.
double resonant_coupling(double a) { return kPi * kPi / (4.0 * a * a); }

RadialGrid well_grid(double a, int p = 10) {
  return RadialGrid(support_breaks(a, 20, 20, 4.0 * a), p);
}
}  // namespace

TEST_CASE("B0 is linear in the coupling") {
  const RadialGrid g = well_grid(1.0);
  const RadialPotential V = RadialPotential::square_well(-1.0, 1.0);
  const KernelOperator B1 = assemble_b0(V, g);
  const KernelOperator B3 = assemble_b0(V.with_coupling(3.0), g);
  CHECK((B3.matrix - 3.0 * B1.matrix).cwiseAbs().maxCoeff() <=
        1e-14 * B3.matrix.cwiseAbs().maxCoeff());
  CHECK((B1.matrix - B1.matrix.transpose()).cwiseAbs().maxCoeff() <=
        1e-15 * B1.matrix.cwiseAbs().maxCoeff());
}

TEST_CASE("unit square well: most negative eigenvalue is -4/pi^2") {
  const RadialGrid g = well_grid(1.0);
  CHECK(g.size() >= 400);
  const std::vector<double> eig = spectrum(assemble_b0(RadialPotential::square_well(-1.0, 1.0), g));
  CHECK(std::abs(eig.front() + 4.0 / (kPi * kPi)) < 1e-3);
}

TEST_CASE("mu(theta) = theta mu(1)") {
  const RadialGrid g = well_grid(1.0);
  const RadialPotential V = RadialPotential::square_well(-1.0, 1.0);
  const double mu1 = spectrum(assemble_b0(V, g)).front();
  for (double theta : {0.5, 2.0, 7.25}) {
    const double mu = spectrum(assemble_b0(V.with_coupling(theta), g)).front();
    CHECK(std::abs(mu - theta * mu1) < 1e-12 * theta);
  }
}

TEST_CASE("grid refinement moves mu_1 by less than 1e-4") {
  const RadialPotential V = RadialPotential::square_well(-1.0, 1.0);
  const double coarse = spectrum(assemble_b0(V, well_grid(1.0, 10))).front();
  const double fine = spectrum(assemble_b0(V, well_grid(1.0, 20))).front();
  CHECK(std::abs(coarse - fine) < 1e-4);
}

TEST_CASE("eigen_near on a diagonal operator") {
  KernelOperator B{RadialGrid(std::vector<double>{0.0, 1.0}, 2), Eigen::MatrixXd::Zero(2, 2), 0, "diag"};
  B.matrix.diagonal() << -1.0, 0.5;
  const EigenPair p = eigen_near(B, -1.0);
  CHECK(p.value == doctest::Approx(-1.0).epsilon(1e-14));
  const Eigen::VectorXd y = B.grid.fold(p.vector);
  CHECK(std::abs(std::abs(y(0)) - 1.0) < 1e-12);
  CHECK(std::abs(y(1)) < 1e-12);
  CHECK(p.second_nearest == doctest::Approx(0.5));
}

TEST_CASE("eigenvalues are invariant under similarity symmetrization") {
  const RadialGrid g = well_grid(1.0);
  const RadialPotential V = RadialPotential::square_well(-resonant_coupling(1.0), 1.0);
  const KernelOperator B = assemble_b0(V, g);
  // nodal operator D^{-1/2} B D^{1/2} is the unsymmetrized similar form
  const KernelOperator N{g, B.nodal(), 0, "nodal"};
  const EigenPair a = eigen_near(B, -1.0);
  const EigenPair b = eigen_near(N, -1.0);
  CHECK(std::abs(a.value - b.value) < 1e-10);
  CHECK(std::abs(a.value + 1.0) < 1e-3);
  CHECK(a.residual <= 1e-8);
  CHECK(std::sqrt(g.inner(a.vector, a.vector)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resonance tuning for unit wells of radius 1 and 2") {
  for (double a : {1.0, 2.0}) {
    const ResonanceData res =
        tune_resonance(RadialPotential::square_well(-1.0, a), well_grid(a));
    CHECK(std::abs(res.theta_star - resonant_coupling(a)) < 1e-3);
    CHECK(std::abs(res.pair.value + 1.0) < 1e-8);
    CHECK(res.overlap > 0.0);
    CHECK_FALSE(res.degenerate);
    CHECK(res.gap > kSimplicityGap);
  }
  CHECK_THROWS_AS(tune_resonance(RadialPotential::square_well(1.0, 1.0), well_grid(1.0)),
                  NoResonanceError);
}

TEST_CASE("overlap and alpha against the analytic eigenfunction") {
  const ResonanceData res = tune_resonance(RadialPotential::square_well(-1.0, 1.0), well_grid(1.0));
  // phi = sin(pi r / 2) / (r sqrt(2 pi)), v = pi / 2 on [0, 1]:
  // <v, phi> = (pi/2) (1/sqrt(2 pi)) 4 pi int_0^1 r sin(pi r/2) dr = 8 / sqrt(2 pi)
  const double overlap = 8.0 / std::sqrt(2.0 * kPi);
  CHECK(res.overlap == doctest::Approx(overlap).epsilon(1e-10));
  CHECK(coupling_to_alpha(0.0, res) == 0.0);
  CHECK(coupling_to_alpha(1.0, res) == doctest::Approx(-1.0 / (overlap * overlap)).epsilon(1e-10));
  CHECK(coupling_to_alpha(1.0, res) < 0.0);
  CHECK(coupling_to_alpha(-2.0, res) > 0.0);

  ResonanceData orthogonal = res;
  orthogonal.overlap = 0.0;
  CHECK_THROWS_AS(coupling_to_alpha(1.0, orthogonal), OrthogonalResonanceError);
}

TEST_CASE("sectors l >= 1 are orthogonal to v") {
  const RadialGrid g = well_grid(1.0, 8);
  const RadialPotential V = RadialPotential::square_well(-30.0, 1.0);
  const KernelOperator B1 = assemble_b0(V, g, 1);
  const EigenPair p = eigen_near(B1, spectrum(B1).front());
  CHECK(overlap_with_v(V, g, p.vector, 1) == 0.0);
}

TEST_CASE("resonance function: tail law and distributional residual") {
  const ResonanceData res = tune_resonance(RadialPotential::square_well(-1.0, 1.0), well_grid(1.0));
  std::vector<double> radii;
  for (double r = 1.25; r <= 10.0; r += 0.25) radii.push_back(r);
  const ResonanceProfile prof = resonance_profile(res, radii);
  for (std::size_t k = 0; k < radii.size(); ++k)
    CHECK(std::abs(4.0 * kPi * radii[k] * prof.psi[k] - prof.tail_constant) < 1e-10);
  CHECK(prof.defect < 1e-6);

  // interior: psi = A sin(pi r / 2) / r up to normalization
  const NewtonTransform psi(res.grid, (split_uv(res.potential, res.grid).second.array() *
                                       res.pair.vector.array()).matrix());
  const double ratio = psi(0.4) * 0.4 / std::sin(kPi * 0.2);
  CHECK(psi(0.8) * 0.8 / std::sin(kPi * 0.4) == doctest::Approx(ratio).epsilon(1e-9));

  std::vector<double> points{0.2, 0.5, 0.8, 1.5, 3.0};
  const DistributionalResidual dr = distributional_residual(res, points, 1e-3);
  CHECK(dr.relative() < 1e-4);
}

TEST_CASE("orthogonal probe: zero tail and square-integrable psi") {
  const ResonanceData res = tune_resonance(RadialPotential::square_well(-1.0, 1.0), well_grid(1.0));
  const RadialGrid& g = res.grid;
  const Eigen::VectorXd v = split_uv(res.potential, g).second;
  Eigen::VectorXd phi(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = g.nodes()(i);
    phi(i) = r < 1.0 ? 1.0 - (5.0 / 3.0) * r * r : 0.0;  // int_0^1 (1 - 5r^2/3) r^2 dr = 0
  }
  const ResonanceProfile prof = resonance_profile(res.potential, g, phi, {2.0, 5.0, 10.0});
  CHECK(std::abs(prof.tail_constant) < 1e-12);
  const NewtonTransform psi(g, (v.array() * phi.array()).matrix());
  CHECK(std::abs(psi.mass(40.0) - psi.mass(20.0)) < 1e-12);

  const NewtonTransform tuned(g, (v.array() * res.pair.vector.array()).matrix());
  // 1/r tail: the mass keeps growing linearly with the cutoff
  CHECK(tuned.mass(40.0) - tuned.mass(20.0) > 0.1);
}

TEST_CASE("localization: B0 and the extended operator agree") {
  const ResonanceData res = tune_resonance(RadialPotential::square_well(-1.0, 1.0), well_grid(1.0, 8));
  const LocalizationReport rep = verify_localization(res);
  CHECK(rep.eigenvalue_discrepancy < 1e-10);
  CHECK(rep.kernel_discrepancy == 0.0);
  CHECK(rep.outside_mass < 1e-12);
  CHECK(rep.extended_eigenvalue == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("boundary conditions do not enter B0") {
  const RadialGrid g(support_breaks(1.0, 10, 10, 5.0), 10);
  const RadialPotential V = RadialPotential::square_well(-1.0, 1.0);
  const KernelOperator D = assemble_b0(V, g, BallDomain(5.0, BoundaryCondition::dirichlet()));
  const KernelOperator R = assemble_b0(V, g, BallDomain(5.0, BoundaryCondition::robin(-0.7)));
  CHECK(D.matrix == R.matrix);
  CHECK(spectrum(D) == spectrum(R));
  CHECK_THROWS_AS(assemble_b0(V, g, BallDomain(0.8, BoundaryCondition::dirichlet())), SupportError);
}
