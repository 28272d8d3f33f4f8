#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "deltalab/grid.hpp"

namespace deltalab {

/// Reduced radial kernel k(r, r') = lower(min(r, r')) * upper(max(r, r')).
///
/// Every Green function of a second-order radial operator has this form;
/// the kernels act on reduced functions chi = r psi against dr.
struct SemiSeparableKernel {
  std::function<double(double)> lower;
  std::function<double(double)> upper;

  double operator()(double r, double s) const {
    return r <= s ? lower(r) * upper(s) : lower(s) * upper(r);
  }
};

/// Folded matrix of a semi-separable kernel on the grid.
///
/// Entry (i, j) acts on folded coordinates y = sqrt(w) f. Blocks between
/// distinct panels use the Gauss-Legendre product rule; blocks on the
/// diagonal integrate the Lagrange basis against the kernel exactly across
/// the kink at r = r', which restores spectral accuracy. The result is
/// symmetric.
Eigen::MatrixXd assemble_folded(const RadialGrid& grid,
                                const SemiSeparableKernel& kernel);

/// Discretized integral operator on a RadialGrid.
///
/// `matrix` is in folded coordinates: its spectral norm is the discrete
/// L2 operator norm, and it is symmetric whenever the operator is.
struct KernelOperator {
  RadialGrid grid;
  Eigen::MatrixXd matrix;
  int sector = 0;
  std::string tag;

  Eigen::Index size() const { return matrix.rows(); }

  /// Applies the operator to nodal values and returns nodal values.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& f) const {
    return grid.unfold(matrix * grid.fold(f));
  }

  /// sum_j K(r_i, r_j) w_j: the operator in nodal coordinates.
  Eigen::MatrixXd nodal() const;
};

}  // namespace deltalab
