#pragma once

#include <vector>

#include <Eigen/Dense>

namespace deltalab {

/// Composite Gauss-Legendre grid on (0, r_max].
///
/// Functions live on the grid as nodal values f(r_i). The weights `w`
/// carry the radial measure, so sum_i w_i f_i approximates
/// int_0^{r_max} f(r) 4 pi r^2 dr. The plain line weights `dr_weights`
/// integrate against dr. Every panel uses the same number of nodes.
class RadialGrid {
 public:
  RadialGrid() = default;
  RadialGrid(std::vector<double> breaks, int nodes_per_panel);

  Eigen::Index size() const { return nodes_.size(); }
  int panel_count() const { return static_cast<int>(breaks_.size()) - 1; }
  int nodes_per_panel() const { return order_; }
  double r_max() const { return breaks_.back(); }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& dr_weights() const { return dr_weights_; }
  const std::vector<double>& breaks() const { return breaks_; }

  /// Index of the first node of panel k.
  Eigen::Index panel_begin(int k) const { return Eigen::Index(k) * order_; }
  double panel_lo(int k) const { return breaks_[k]; }
  double panel_hi(int k) const { return breaks_[k + 1]; }

  /// Panel containing r (closed on the right, first panel closed on both).
  int panel_of(double r) const;

  /// Lagrange interpolant of nodal values, evaluated at r in [0, r_max].
  double interpolate(const Eigen::Ref<const Eigen::VectorXd>& values,
                     double r) const;

  /// Values of the p Lagrange basis functions of panel k at r.
  Eigen::VectorXd panel_basis(int k, double r) const;

  /// sum_i w_i f_i.
  double integrate(const Eigen::Ref<const Eigen::VectorXd>& values) const {
    return weights_.dot(values);
  }

  /// Discrete L2 inner product with the radial measure.
  double inner(const Eigen::Ref<const Eigen::VectorXd>& f,
               const Eigen::Ref<const Eigen::VectorXd>& g) const {
    return (weights_.array() * f.array() * g.array()).sum();
  }

  /// Nodal values -> coordinates in which the discrete L2 norm is Euclidean.
  Eigen::VectorXd fold(const Eigen::Ref<const Eigen::VectorXd>& f) const {
    return (sqrt_weights_.array() * f.array()).matrix();
  }
  Eigen::VectorXd unfold(const Eigen::Ref<const Eigen::VectorXd>& y) const {
    return (y.array() / sqrt_weights_.array()).matrix();
  }
  const Eigen::VectorXd& sqrt_weights() const { return sqrt_weights_; }

  /// Reference Gauss-Legendre nodes on [-1, 1] shared by every panel.
  const Eigen::VectorXd& reference_nodes() const { return ref_nodes_; }

  bool operator==(const RadialGrid& other) const {
    return breaks_ == other.breaks_ && order_ == other.order_;
  }

 private:
  std::vector<double> breaks_;
  int order_ = 0;
  Eigen::VectorXd nodes_, weights_, dr_weights_, sqrt_weights_;
  Eigen::VectorXd ref_nodes_, ref_bary_;
};

/// Panel boundaries 0 < inner_scale < ... < r_max, geometric between
/// inner_scale and r_max. With n_panels == 1 the single panel is (0, r_max];
/// if inner_scale == r_max the panels are uniform.
std::vector<double> graded_breaks(int n_panels, double r_max, double inner_scale);

/// Adds extra panel boundaries (e.g. support edges) inside (0, r_max).
std::vector<double> insert_breakpoints(std::vector<double> breaks,
                                       const std::vector<double>& extra);

/// Splits (0, edge] into `count` uniform panels and continues geometrically
/// from edge to r_max with `outer` panels.
std::vector<double> support_breaks(double edge, int count, int outer,
                                   double r_max);

RadialGrid build_graded_grid(int n_panels, int nodes_per_panel, double r_max,
                             double inner_scale);

/// Same panels on (0, r_max] plus `extra_panels` geometric panels up to
/// new_r_max.
RadialGrid extend_grid(const RadialGrid& grid, double new_r_max,
                       int extra_panels);

}  // namespace deltalab
