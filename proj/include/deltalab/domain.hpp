#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "deltalab/errors.hpp"

namespace deltalab {

/// Boundary condition on the sphere |x| = R.
///
/// Robin reads d_n psi + (b / R) psi = 0: b is dimensionless, measured in
/// units of 1/R. Neumann is Robin with b = 0; Dirichlet is the b = +inf limit.
struct BoundaryCondition {
  enum class Kind { Dirichlet, Robin };

  Kind kind = Kind::Dirichlet;
  double b = 0.0;

  static BoundaryCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }
  static BoundaryCondition neumann() { return {Kind::Robin, 0.0}; }
  static BoundaryCondition robin(double b) {
    if (!std::isfinite(b)) throw ParameterError("Robin parameter b must be finite");
    return {Kind::Robin, b};
  }

  bool is_dirichlet() const { return kind == Kind::Dirichlet; }
  std::string label() const;

  bool operator==(const BoundaryCondition&) const = default;
};

/// Ball of radius R centred on the interaction point.
struct BallDomain {
  double radius = 1.0;
  BoundaryCondition bc;

  BallDomain() = default;
  BallDomain(double R, BoundaryCondition condition) : radius(R), bc(condition) {
    if (!(R > 0.0) || !std::isfinite(R))
      throw ParameterError("BallDomain: radius must be positive");
  }
  bool operator==(const BallDomain&) const = default;
};

/// Whole space; operators are compressed onto the grid range.
struct FreeSpace {
  bool operator==(const FreeSpace&) const = default;
};

using Region = std::variant<FreeSpace, BallDomain>;

std::string describe(const Region& region);

/// Real spectral shift z > 0 with kappa = sqrt(z).
class SpectralPoint {
 public:
  explicit SpectralPoint(double z) : z_(z), kappa_(std::sqrt(z)) {
    if (!(z > 0.0) || !std::isfinite(z))
      throw ParameterError("SpectralPoint: z must be positive and finite");
  }
  static SpectralPoint from_kappa(double kappa) {
    SpectralPoint p(kappa * kappa);
    p.kappa_ = kappa;
    return p;
  }
  double z() const { return z_; }
  double kappa() const { return kappa_; }

 private:
  double z_;
  double kappa_;
};

/// Point-interaction strength alpha; infinity is the free operator.
class PointInteractionStrength {
 public:
  explicit PointInteractionStrength(double alpha) : alpha_(alpha) {
    if (std::isnan(alpha)) throw ParameterError("alpha must not be NaN");
  }
  static PointInteractionStrength infinity() {
    return PointInteractionStrength(std::numeric_limits<double>::infinity());
  }
  bool is_infinite() const { return std::isinf(alpha_) && alpha_ > 0; }
  double value() const { return alpha_; }

 private:
  double alpha_;
};

}  // namespace deltalab
