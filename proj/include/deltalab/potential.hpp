#pragma once

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "deltalab/domain.hpp"
#include "deltalab/grid.hpp"

namespace deltalab {

/// Constant well (sign = -1 attractive, +1 repulsive) on [0, support].
struct SquareWell {
  int sign = -1;
};

/// sign * exp(-r^2 / (2 width^2)) on [0, support].
struct TruncatedGaussian {
  int sign = -1;
  double width = 1.0;
};

/// Piecewise-linear profile through (r_k, value_k); zero past the last sample.
struct Tabulated {
  std::vector<double> r;
  std::vector<double> values;
};

using Profile = std::variant<SquareWell, TruncatedGaussian, Tabulated>;

/// Compactly supported radial potential
///   V(r) = coupling * shape(r / length_scale),
/// where shape is defined on [0, base_support] and vanishes outside.
/// Densities for the rank-one scheme reuse this type.
class RadialPotential {
 public:
  RadialPotential() : RadialPotential(SquareWell{}, 1.0, 0.0) {}
  RadialPotential(Profile profile, double base_support, double coupling,
                  double length_scale = 1.0);

  /// V = value on [0, support]; value = -theta is an attractive well.
  static RadialPotential square_well(double value, double support);

  double operator()(double r) const;
  Eigen::VectorXd sample(const RadialGrid& grid) const;

  double support() const { return base_support_ * length_scale_; }
  double coupling() const { return coupling_; }
  double length_scale() const { return length_scale_; }
  double base_support() const { return base_support_; }
  const Profile& profile() const { return profile_; }

  /// Same profile and scale with a new coupling.
  RadialPotential with_coupling(double coupling) const;

  /// True if the potential does not change sign.
  bool sign_definite() const;

  /// int V dx, by high-order composite quadrature independent of any grid.
  double integral() const;

  /// Breakpoints where the profile may lose smoothness.
  std::vector<double> kinks() const;

  bool operator==(const RadialPotential&) const;

 private:
  double shape(double s) const;

  Profile profile_;
  double base_support_;
  double coupling_;
  double length_scale_;
};

/// The family V_eps(x) = ((1 + lambda eps) / eps^2) V(x / eps).
struct ScalingFamily {
  RadialPotential base;
  double lambda = 0.0;
  std::vector<double> eps;
};

/// V_eps for one eps. Throws SupportError if eps * a >= R.
RadialPotential scale_potential(const ScalingFamily& family, double eps,
                                const Region& region);
RadialPotential scale_potential(const ScalingFamily& family, double eps);

/// rho^eps(x) = eps^{-3} rho(x / eps).
RadialPotential dilate_density(const RadialPotential& rho, double eps);

/// Rescales the coupling so that int rho dx = 1.
RadialPotential normalize_density(const RadialPotential& rho);

/// u = sgn(V)|V|^{1/2}, v = |V|^{1/2} on the grid nodes.
std::pair<Eigen::VectorXd, Eigen::VectorXd> split_uv(const RadialPotential& V,
                                                     const RadialGrid& grid);

/// Throws SupportError unless supp(V) lies strictly inside the region.
void check_support(const RadialPotential& V, const Region& region);

}  // namespace deltalab
