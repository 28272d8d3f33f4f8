#pragma once

#include <optional>

#include "deltalab/domain.hpp"
#include "deltalab/grid.hpp"
#include "deltalab/kernel.hpp"

namespace deltalab {

/// Gamma_z(r) = exp(-kappa r) / (4 pi r).
double free_gamma(const SpectralPoint& z, double r);

/// h_z(r) = A sinh(kappa r) / r, the regular part of the ball Green
/// function with pole at the origin.
struct CorrectionL0 {
  double coefficient = 0.0;
  double kappa = 0.0;

  double operator()(double r) const;
  double at_origin() const { return coefficient * kappa; }
};

/// Solves sigma(A sinh(kappa r)/r) = -sigma(Gamma_z) at r = R.
/// Throws SingularCorrectionError when the condition degenerates.
CorrectionL0 correction_l0(const BallDomain& domain, const SpectralPoint& z);

/// sigma applied to a radial function given its value and derivative at R.
double apply_sigma(const BallDomain& domain, double value, double derivative);

/// sigma(Gamma_z + h_z) at r = R; zero up to rounding.
double boundary_residual(const BallDomain& domain, const SpectralPoint& z,
                         const CorrectionL0& h);

/// G_z(r) = Gamma_z(r) + h_z(r) (free space: Gamma_z).
double point_green(const Region& region, const SpectralPoint& z, double r);

/// h_z(0); zero in free space.
double correction_at_origin(const Region& region, const SpectralPoint& z);

/// Regular and decaying solutions of -chi'' + l(l+1)/r^2 chi + kappa^2 chi = 0.
struct SectorSolutions {
  int l = 0;
  double kappa = 1.0;

  double regular(double r) const;
  double regular_derivative(double r) const;
  double decaying(double r) const;
  double decaying_derivative(double r) const;
  /// regular * decaying' - regular' * decaying (constant in r).
  double wronskian() const;
};

/// Reduced Green kernel of sector l: the kernel of (-Delta_sigma + z)^{-1}
/// restricted to angular momentum l, acting on chi = r psi against dr.
SemiSeparableKernel sector_green(const Region& region, const SpectralPoint& z,
                                 int l);

/// Reduced Newton kernel r_<^{l+1} / ((2l + 1) r_>^l), i.e. (-Delta)^{-1}
/// with the 1/(4 pi |x - y|) normalization.
SemiSeparableKernel newton_kernel(int l);

/// Three-dimensional sector kernel value G_l(r, r') = g_l(r, r') / (4 pi);
/// for l = 0 this is the angular average of the Green function.
double green_value(const Region& region, const SpectralPoint& z, int l,
                   double r, double s);

/// Discretized l = 0 resolvent kernel of -Delta_sigma (or -Delta) at z.
KernelOperator green_kernel_l0(const Region& region, const SpectralPoint& z,
                               const RadialGrid& grid);
KernelOperator green_kernel_l(const Region& region, const SpectralPoint& z,
                              const RadialGrid& grid, int l);

/// (alpha + kappa/(4 pi) - h_z(0))^{-1}; zero for alpha = infinity.
double c_alpha(const BallDomain& domain, const SpectralPoint& z,
               const PointInteractionStrength& alpha);

/// (alpha + kappa/(4 pi))^{-1}; zero for alpha = infinity.
double d_alpha(const SpectralPoint& z, const PointInteractionStrength& alpha);

/// c_alpha on a ball, d_alpha in free space.
double point_coefficient(const Region& region, const SpectralPoint& z,
                         const PointInteractionStrength& alpha);

/// Lowest l = 0 eigenvalue of -Delta_sigma when it is negative (Robin b < 0).
std::optional<double> negative_boundary_eigenvalue(const BallDomain& domain);

/// Smallest z for which -Delta_sigma + z is positive on the l = 0 sector.
double admissible_z_floor(const Region& region);

}  // namespace deltalab
