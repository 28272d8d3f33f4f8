#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deltalab/domain.hpp"
#include "deltalab/errors.hpp"
#include "deltalab/grid.hpp"
#include "deltalab/potential.hpp"

namespace deltalab {

/// A resolvent discretized on a RadialGrid, in folded coordinates.
struct DiscreteResolvent {
  RadialGrid grid;
  Eigen::MatrixXd matrix;
  int sector = 0;
  double z = 0.0;
  /// "free", "kk", "point", "nonlocal".
  std::string kind;
  std::string region;
  std::map<std::string, double> parameters;

  Eigen::Index size() const { return matrix.rows(); }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& f) const {
    return grid.unfold(matrix * grid.fold(f));
  }
};

/// c |g><h| in folded coordinates.
struct RankOneUpdate {
  Eigen::VectorXd g;
  Eigen::VectorXd h;
  double c = 0.0;

  Eigen::MatrixXd dense() const { return c * g * h.transpose(); }
};

/// (-Delta_sigma + z)^{-1}, or (-Delta + z)^{-1} compressed to the grid range.
DiscreteResolvent r0(const Region& region, const SpectralPoint& z,
                     const RadialGrid& grid, int l = 0);

/// Smallest singular value of 1 + u R0 v tolerated by kk_resolvent.
inline constexpr double kBirmanSchwingerFloor = 1e-10;

/// (-Delta_sigma + V + z)^{-1} = R0 - R0 v (1 + u R0 v)^{-1} u R0.
/// Throws SpectralPointError when 1 + u R0 v is numerically singular.
DiscreteResolvent kk_resolvent(const Region& region, const SpectralPoint& z,
                               const RadialPotential& V, const RadialGrid& grid,
                               int l = 0);

/// Point-interaction term c_z(alpha) |G_z><G_z| with G_z sampled on the grid.
RankOneUpdate point_update(const Region& region, const SpectralPoint& z,
                           const PointInteractionStrength& alpha,
                           const RadialGrid& grid);

/// (-Delta_{alpha,sigma} + z)^{-1}. Sectors l >= 1 do not see the point
/// interaction and return r0.
DiscreteResolvent pi_resolvent(const Region& region, const SpectralPoint& z,
                               const PointInteractionStrength& alpha,
                               const RadialGrid& grid, int l = 0);

/// alpha + kappa/(4 pi) - h_z(0) at z = kappa^2 (h = 0 in free space).
double pi_denominator(const Region& region, double alpha, double kappa);

/// Lowest bound-state energy E < 0 of the point interaction with
/// E >= -e_max, or nothing. The denominator is multiplied by the boundary
/// functional of sinh(kappa r)/r, which removes the poles of h_z(0); roots
/// are bracketed on a logarithmic kappa scan and bisected.
std::optional<double> pi_eigenvalue(const Region& region, double alpha,
                                    double e_max = 1e4);

/// (rho, (-Delta)^{-1} rho) for a density of unit mass.
double electrostatic_energy(const RadialPotential& rho, const RadialGrid& grid);

/// Classical self-energy 3 / (10 pi a) of the unit-mass uniform ball.
double uniform_ball_energy(double a);

/// a(eps) = -eps / ell + alpha eps^2 / ell^2.
double a_eps(double eps, double alpha, double ell);

/// <rho, R0 rho> with rho sampled on the grid of R0.
double density_pairing(const DiscreteResolvent& R0, const RadialPotential& rho);

/// R0 - |R0 rho><R0 rho| / (1/a + <rho, R0 rho>); R0 itself for a = 0.
DiscreteResolvent nonlocal_resolvent(const Region& region, const SpectralPoint& z,
                                     const RadialPotential& rho, double a,
                                     const RadialGrid& grid);

/// Largest singular value by power iteration on A^T A, started from the
/// normalized all-ones vector. Converged when ||A^T A x - s^2 x|| <= tol s^2.
template <class Derived>
double largest_singular_value(const Eigen::MatrixBase<Derived>& A,
                              double tol = 1e-8, int max_iter = 50000) {
  const Eigen::MatrixXd M = A;
  if (M.size() == 0 || M.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(M.cols());
  if ((M * x).norm() == 0.0) {
    Eigen::Index k;
    M.colwise().norm().maxCoeff(&k);
    x.setZero();
    x(k) = 1.0;
  }
  x.normalize();
  double lambda = 0.0, residual = INFINITY;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = M.transpose() * (M * x);
    lambda = x.dot(y);
    residual = (y - lambda * x).norm();
    if (residual <= tol * lambda) return std::sqrt(lambda);
    x = y / y.norm();
  }
  throw ConvergenceError("largest_singular_value: power iteration did not converge",
                         residual / std::max(lambda, 1e-300));
}

enum class NormKind { L2, H2Proxy };

/// Radial annulus [r1, r2] restricting the output rows of a norm.
struct Annulus {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Discrete first and second derivative matrices (rows: annulus nodes,
/// columns: all grid nodes) from nonuniform three-point stencils.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> radial_differences(
    const RadialGrid& grid, const std::vector<Eigen::Index>& rows);

/// Operator norm of A - B from L2(grid) to L2 (or the H2 proxy) on the
/// annulus, or on the whole grid without one.
double op_norm_diff(const DiscreteResolvent& A, const DiscreteResolvent& B,
                    std::optional<Annulus> annulus = std::nullopt,
                    NormKind kind = NormKind::L2);

/// Same for raw folded matrices on a common grid.
double op_norm_diff(const RadialGrid& grid, const Eigen::MatrixXd& A,
                    const Eigen::MatrixXd& B, std::optional<Annulus> annulus,
                    NormKind kind);

}  // namespace deltalab
