#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "deltalab/domain.hpp"
#include "deltalab/grid.hpp"
#include "deltalab/kernel.hpp"
#include "deltalab/potential.hpp"

namespace deltalab {

/// Birman-Schwinger operator u (-Delta)^{-1} v in angular momentum sector l.
///
/// The kernel is u(r) v(r') / (4 pi |x - y|) projected on sector l; its
/// folded matrix is symmetric for sign-definite V.
KernelOperator assemble_b0(const RadialPotential& V, const RadialGrid& grid,
                           int l = 0);

/// Same, additionally checking that V and the grid lie inside `region`.
KernelOperator assemble_b0(const RadialPotential& V, const RadialGrid& grid,
                           const Region& region, int l = 0);

struct EigenPair {
  double value = 0.0;
  /// Nodal values, normalized in the discrete L2 norm.
  Eigen::VectorXd vector;
  double residual = 0.0;
  /// Eigenvalue second-closest to the target.
  double second_nearest = 0.0;
  int iterations = 0;
  int sector = 0;
};

/// Eigenpair nearest `target` by shifted inverse iteration.
EigenPair eigen_near(const KernelOperator& B, double target);

/// All eigenvalues of the operator (real parts), ascending.
std::vector<double> spectrum(const KernelOperator& B);

/// <v, f> with v = |V|^{1/2}. Sectors l >= 1 are orthogonal to radial v.
double overlap_with_v(const RadialPotential& V, const RadialGrid& grid,
                      const Eigen::VectorXd& f, int sector = 0);

struct ResonanceData {
  double theta_star = 0.0;
  /// Most negative l = 0 eigenvalue at unit coupling.
  double mu_unit = 0.0;
  RadialPotential potential;  // coupling theta_star
  RadialGrid grid;
  EigenPair pair;
  double overlap = 0.0;
  double gap = 0.0;
  bool degenerate = false;
  bool experimental = false;
};

inline constexpr double kSimplicityGap = 1e-6;
inline constexpr double kOverlapThreshold = 1e-8;

/// Tunes the coupling so that -1 is the most negative eigenvalue of B_0.
/// Throws NoResonanceError when no negative eigenvalue exists.
ResonanceData tune_resonance(const RadialPotential& V, const RadialGrid& grid);

/// alpha = -lambda |<v, phi>|^{-2}.
double coupling_to_alpha(double lambda, const ResonanceData& res);

/// psi = (-Delta)^{-1} g for the radial Lagrange interpolant of nodal g.
class NewtonTransform {
 public:
  NewtonTransform(RadialGrid grid, Eigen::VectorXd g);
  double operator()(double r) const;
  /// int g dx; equals 4 pi r psi(r) beyond supp(g).
  double charge() const { return charge_; }
  /// int_0^cutoff psi^2 dx.
  double mass(double cutoff) const;

 private:
  RadialGrid grid_;
  Eigen::VectorXd g_;
  double charge_;
};

struct ResonanceProfile {
  std::vector<double> r;
  std::vector<double> psi;
  /// 4 pi r psi(r) at the largest sample radius.
  double tail_constant = 0.0;
  double overlap = 0.0;
  /// |tail_constant - overlap|.
  double defect = 0.0;
};

/// Resonance function psi = (-Delta)^{-1} v phi sampled at r_out.
ResonanceProfile resonance_profile(const ResonanceData& res,
                                   const std::vector<double>& r_out);

/// Same for an arbitrary radial phi on the grid of V.
ResonanceProfile resonance_profile(const RadialPotential& V,
                                   const RadialGrid& grid,
                                   const Eigen::VectorXd& phi,
                                   const std::vector<double>& r_out);

struct DistributionalResidual {
  double max_residual = 0.0;
  double max_potential_term = 0.0;
  double relative() const {
    return max_potential_term > 0.0 ? max_residual / max_potential_term : max_residual;
  }
};

/// max |-Delta psi + V psi| over `points`, with -Delta from a centred second
/// difference of r psi with step h.
DistributionalResidual distributional_residual(const ResonanceData& res,
                                               const std::vector<double>& points,
                                               double h);

struct LocalizationReport {
  double eigenvalue_discrepancy = 0.0;
  double kernel_discrepancy = 0.0;
  double outside_mass = 0.0;
  double extended_eigenvalue = 0.0;
};

/// Compares B_0 on the resonance grid with the operator on a grid extended
/// past its range.
LocalizationReport verify_localization(const ResonanceData& res);

}  // namespace deltalab
