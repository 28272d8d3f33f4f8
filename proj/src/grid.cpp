#include "deltalab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deltalab/errors.hpp"
#include "deltalab/quadrature.hpp"

namespace deltalab {

RadialGrid::RadialGrid(std::vector<double> breaks, int nodes_per_panel)
    : breaks_(std::move(breaks)), order_(nodes_per_panel) {
  if (order_ < 2) throw ParameterError("RadialGrid: nodes_per_panel must be >= 2");
  if (breaks_.size() < 2 || breaks_.front() != 0.0)
    throw ParameterError("RadialGrid: breaks must start at 0 and hold one panel");
  for (std::size_t k = 1; k < breaks_.size(); ++k)
    if (!(breaks_[k] > breaks_[k - 1]))
      throw ParameterError("RadialGrid: breaks must be strictly increasing");

  GaussRule ref = gauss_legendre(order_);
  ref_nodes_ = ref.nodes;
  ref_bary_ = barycentric_weights(ref.nodes);

  const Eigen::Index n = Eigen::Index(panel_count()) * order_;
  nodes_.resize(n);
  dr_weights_.resize(n);
  for (int k = 0; k < panel_count(); ++k) {
    const double half = 0.5 * (breaks_[k + 1] - breaks_[k]);
    const double mid = 0.5 * (breaks_[k + 1] + breaks_[k]);
    for (int i = 0; i < order_; ++i) {
      nodes_(panel_begin(k) + i) = mid + half * ref.nodes(i);
      dr_weights_(panel_begin(k) + i) = half * ref.weights(i);
    }
  }
  weights_ = (4.0 * std::numbers::pi * nodes_.array().square() *
              dr_weights_.array())
                 .matrix();
  sqrt_weights_ = weights_.cwiseSqrt();
}

int RadialGrid::panel_of(double r) const {
  if (r < 0.0 || r > r_max())
    throw ParameterError("RadialGrid::panel_of: r outside (0, r_max]");
  auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(), r);
  return static_cast<int>(it - breaks_.begin()) - 1;
}

Eigen::VectorXd RadialGrid::panel_basis(int k, double r) const {
  const double half = 0.5 * (breaks_[k + 1] - breaks_[k]);
  const double mid = 0.5 * (breaks_[k + 1] + breaks_[k]);
  return lagrange_basis(ref_nodes_, ref_bary_, (r - mid) / half);
}

double RadialGrid::interpolate(const Eigen::Ref<const Eigen::VectorXd>& values,
                               double r) const {
  const int k = panel_of(r);
  return panel_basis(k, r).dot(values.segment(panel_begin(k), order_));
}

std::vector<double> graded_breaks(int n_panels, double r_max, double inner_scale) {
  if (n_panels < 1) throw ParameterError("graded_breaks: n_panels must be >= 1");
  if (!(r_max > 0.0) || !(inner_scale > 0.0) || inner_scale > r_max)
    throw ParameterError("graded_breaks: need 0 < inner_scale <= r_max");
  std::vector<double> breaks{0.0};
  if (n_panels == 1) {
    breaks.push_back(r_max);
    return breaks;
  }
  if (inner_scale >= r_max * (1.0 - 1e-12)) {
    for (int k = 1; k <= n_panels; ++k) breaks.push_back(r_max * k / n_panels);
    breaks.back() = r_max;
    return breaks;
  }
  const double q = std::pow(r_max / inner_scale, 1.0 / (n_panels - 1));
  for (int k = 0; k < n_panels; ++k) breaks.push_back(inner_scale * std::pow(q, k));
  breaks.back() = r_max;
  return breaks;
}

std::vector<double> insert_breakpoints(std::vector<double> breaks,
                                       const std::vector<double>& extra) {
  const double top = breaks.back();
  for (double x : extra) {
    if (!(x > 0.0) || x >= top) continue;
    bool present = std::any_of(breaks.begin(), breaks.end(), [&](double b) {
      return std::abs(b - x) <= 1e-12 * top;
    });
    if (!present) breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  return breaks;
}

std::vector<double> support_breaks(double edge, int count, int outer,
                                   double r_max) {
  if (count < 1 || outer < 0)
    throw ParameterError("support_breaks: need count >= 1, outer >= 0");
  if (!(edge > 0.0) || edge > r_max)
    throw ParameterError("support_breaks: need 0 < edge <= r_max");
  std::vector<double> breaks{0.0};
  for (int k = 1; k <= count; ++k) breaks.push_back(edge * k / count);
  breaks.back() = edge;
  if (edge < r_max) {
    if (outer < 1) throw ParameterError("support_breaks: outer panels required");
    const double q = std::pow(r_max / edge, 1.0 / outer);
    for (int k = 1; k <= outer; ++k) breaks.push_back(edge * std::pow(q, k));
    breaks.back() = r_max;
  }
  return breaks;
}

RadialGrid build_graded_grid(int n_panels, int nodes_per_panel, double r_max,
                             double inner_scale) {
  if (nodes_per_panel < 2)
    throw ParameterError("build_graded_grid: nodes_per_panel must be >= 2");
  return RadialGrid(graded_breaks(n_panels, r_max, inner_scale), nodes_per_panel);
}

RadialGrid extend_grid(const RadialGrid& grid, double new_r_max,
                       int extra_panels) {
  if (!(new_r_max > grid.r_max()) || extra_panels < 1)
    throw ParameterError("extend_grid: need new_r_max > r_max and panels >= 1");
  std::vector<double> breaks = grid.breaks();
  const double start = grid.r_max();
  const double q = std::pow(new_r_max / start, 1.0 / extra_panels);
  for (int k = 1; k <= extra_panels; ++k) breaks.push_back(start * std::pow(q, k));
  breaks.back() = new_r_max;
  return RadialGrid(std::move(breaks), grid.nodes_per_panel());
}

}  // namespace deltalab
