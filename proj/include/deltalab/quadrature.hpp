#pragma once

#include <Eigen/Dense>

namespace deltalab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int n);

/// Nodes and weights of an n-point rule mapped onto [a, b].
GaussRule gauss_legendre(int n, double a, double b);

/// Barycentric weights for Lagrange interpolation on arbitrary distinct nodes.
Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes);

/// Values of all Lagrange basis polynomials L_j(x) on `nodes`.
Eigen::VectorXd lagrange_basis(const Eigen::VectorXd& nodes,
                               const Eigen::VectorXd& bary, double x);

/// Evaluate the interpolant through (nodes, values) at x.
double lagrange_eval(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bary,
                     const Eigen::Ref<const Eigen::VectorXd>& values, double x);

}  // namespace deltalab
