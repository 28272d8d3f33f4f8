#include "deltalab/kernel.hpp"

#include <algorithm>

#include "deltalab/quadrature.hpp"

namespace deltalab {

namespace {

// Exact Galerkin block int int L_i(r) k(r, s) L_j(s) dr ds on one panel.
Eigen::MatrixXd diagonal_block(const RadialGrid& grid, int k,
                               const SemiSeparableKernel& kernel) {
  const int p = grid.nodes_per_panel();
  const int m = std::max(2 * p, 24);
  const double lo = grid.panel_lo(k);
  const double hi = grid.panel_hi(k);
  const GaussRule outer = gauss_legendre(m, lo, hi);
  const GaussRule ref = gauss_legendre(m);

  // basis values at outer nodes
  Eigen::MatrixXd basis_outer(m, p);
  for (int a = 0; a < m; ++a) basis_outer.row(a) = grid.panel_basis(k, outer.nodes(a));

  // (K L_j)(r_a) for every outer node r_a
  Eigen::MatrixXd applied(m, p);
  for (int a = 0; a < m; ++a) {
    const double r = outer.nodes(a);
    Eigen::VectorXd below = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd above = Eigen::VectorXd::Zero(p);
    const double hb = 0.5 * (r - lo);
    const double ha = 0.5 * (hi - r);
    for (int c = 0; c < m; ++c) {
      const double sb = lo + hb * (ref.nodes(c) + 1.0);
      below += (hb * ref.weights(c) * kernel.lower(sb)) * grid.panel_basis(k, sb);
      const double sa = r + ha * (ref.nodes(c) + 1.0);
      above += (ha * ref.weights(c) * kernel.upper(sa)) * grid.panel_basis(k, sa);
    }
    applied.row(a) = kernel.upper(r) * below.transpose() + kernel.lower(r) * above.transpose();
  }
  Eigen::MatrixXd block =
      basis_outer.transpose() * outer.weights.asDiagonal() * applied;
  return 0.5 * (block + block.transpose());
}

}  // namespace

Eigen::MatrixXd assemble_folded(const RadialGrid& grid,
                                const SemiSeparableKernel& kernel) {
  const Eigen::Index n = grid.size();
  const Eigen::VectorXd& r = grid.nodes();
  Eigen::VectorXd sw = grid.dr_weights().cwiseSqrt();
  Eigen::VectorXd lower(n), upper(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lower(i) = kernel.lower(r(i));
    upper(i) = kernel.upper(r(i));
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) out(i, j) = out(j, i) = sw(i) * lower(i) * upper(j) * sw(j);
  const int p = grid.nodes_per_panel();
  for (int k = 0; k < grid.panel_count(); ++k) {
    const Eigen::Index b = grid.panel_begin(k);
    Eigen::MatrixXd block = diagonal_block(grid, k, kernel);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        out(b + i, b + j) = block(i, j) / (sw(b + i) * sw(b + j));
  }
  return out;
}

Eigen::MatrixXd KernelOperator::nodal() const {
  const Eigen::VectorXd& s = grid.sqrt_weights();
  return s.cwiseInverse().asDiagonal() * matrix * s.asDiagonal();
}

}  // namespace deltalab
