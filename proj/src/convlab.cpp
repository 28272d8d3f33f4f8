#include "deltalab/convlab.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "deltalab/errors.hpp"
#include "deltalab/greens.hpp"

namespace deltalab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_eps(const std::vector<double>& eps) {
  if (eps.empty()) throw ParameterError("sweep: empty eps list");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0) || eps[k] > 1.0)
      throw ParameterError("sweep: eps values must lie in (0, 1]");
    if (k > 0 && !(eps[k] < eps[k - 1]))
      throw ParameterError("sweep: eps values must be strictly decreasing");
  }
}

double region_radius(const Region& region, const GridSpec& spec) {
  if (const auto* ball = std::get_if<BallDomain>(&region)) return ball->radius;
  return spec.free_r_max;
}

// Rows are independent; each runs on its own task and lands in its slot.
std::vector<ConvergenceRow> run_rows(
    const std::vector<double>& eps,
    const std::function<ConvergenceRow(double)>& row) {
  std::vector<std::future<ConvergenceRow>> jobs;
  for (double e : eps) jobs.push_back(std::async(std::launch::async, row, e));
  std::vector<ConvergenceRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

ConvergenceRow invalid_row(double eps, const std::string& why) {
  ConvergenceRow r;
  r.eps = eps;
  r.norm_l0 = r.norm_ann_l2 = r.norm_ann_h2 = r.scalar_gap = r.norm_alt = kNaN;
  r.valid = false;
  r.note = why;
  return r;
}

void fill_norms(ConvergenceRow& row, const DiscreteResolvent& A,
                const DiscreteResolvent& target, const DiscreteResolvent& alt,
                const std::optional<Annulus>& annulus) {
  row.norm_l0 = op_norm_diff(A, target);
  row.norm_alt = op_norm_diff(A, alt);
  if (annulus) {
    row.norm_ann_l2 = op_norm_diff(A, target, annulus, NormKind::L2);
    row.norm_ann_h2 = op_norm_diff(A, target, annulus, NormKind::H2Proxy);
  } else {
    row.norm_ann_l2 = row.norm_ann_h2 = kNaN;
  }
}

std::optional<RateFit> try_fit(const std::vector<ConvergenceRow>& rows,
                               double ConvergenceRow::*column) {
  try {
    return fit_rate(rows, [column](const ConvergenceRow& r) { return r.*column; });
  } catch (const FitError&) {
    return std::nullopt;
  }
}

void finish(ConvergenceReport& report) {
  report.fit_l0 = try_fit(report.rows, &ConvergenceRow::norm_l0);
  report.fit_ann_l2 = try_fit(report.rows, &ConvergenceRow::norm_ann_l2);
  report.fit_ann_h2 = try_fit(report.rows, &ConvergenceRow::norm_ann_h2);
  report.fit_gap = try_fit(report.rows, &ConvergenceRow::scalar_gap);
  report.fit_alt = try_fit(report.rows, &ConvergenceRow::norm_alt);
}

// Empty string when z is admissible for the limit operator.
std::string z_guard(const Region& region, const SpectralPoint& z,
                    std::optional<double> alpha, double guard) {
  if (z.z() <= admissible_z_floor(region) + guard)
    return "z below the admissible window of -Delta_sigma";
  if (alpha && std::isfinite(*alpha)) {
    if (auto E = pi_eigenvalue(region, *alpha, std::max(1e4, 4.0 * z.z())))
      if (std::abs(z.z() + *E) < guard) return "z within guard of a point-interaction eigenvalue";
  }
  return {};
}

void describe_common(ConvergenceReport& report, const Region& region,
                     const SpectralPoint& z, const SweepSettings& s) {
  report.slope_threshold = s.slope_threshold;
  report.metadata["region"] = describe(region);
  report.metadata["z"] = num(z.z());
  report.metadata["grid"] = std::to_string(s.grid.support_panels) + "+" +
                            std::to_string(s.grid.outer_panels) + " panels x " +
                            std::to_string(s.grid.nodes_per_panel) + " nodes";
  if (s.annulus)
    report.metadata["annulus"] = "[" + num(s.annulus->r1) + ", " + num(s.annulus->r2) + "]";
}

}  // namespace

RadialGrid GridSpec::build(double edge, const Region& region,
                           std::optional<Annulus> annulus) const {
  const double r_max = region_radius(region, *this);
  std::vector<double> breaks = support_breaks(edge, support_panels, outer_panels, r_max);
  if (annulus) breaks = insert_breakpoints(std::move(breaks), {annulus->r1, annulus->r2});
  return RadialGrid(std::move(breaks), nodes_per_panel);
}

bool ConvergenceReport::all_valid() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.valid; });
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size()) throw FitError("fit_rate: size mismatch");
  if (eps.size() < 4) throw FitError("fit_rate: need at least 4 rows");
  std::ostringstream bad;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!(values[k] > 0.0) || !(eps[k] > 0.0)) bad << " " << k;
  if (!bad.str().empty())
    throw FitError("fit_rate: nonpositive values in rows" + bad.str());

  const Eigen::Index n = Eigen::Index(eps.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    A(k, 0) = std::log(eps[k]);
    A(k, 1) = 1.0;
    y(k) = std::log(values[k]);
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  const double ss_res = (A * c - y).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  RateFit fit;
  fit.slope = c(0);
  fit.intercept = c(1);
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points = int(n);
  return fit;
}

RateFit fit_rate(const std::vector<ConvergenceRow>& rows,
                 const std::function<double(const ConvergenceRow&)>& column) {
  std::vector<double> eps, values;
  for (const auto& r : rows) {
    if (!r.valid) continue;
    eps.push_back(r.eps);
    values.push_back(column(r));
  }
  return fit_rate(eps, values);
}

ConvergenceReport sweep_local(const Region& region, const RadialPotential& V,
                              double lambda, const std::vector<double>& eps,
                              const SpectralPoint& z, const SweepSettings& settings,
                              const std::optional<ResonanceData>& resonance) {
  check_eps(eps);
  ConvergenceReport report;
  report.experiment = "local";
  describe_common(report, region, z, settings);
  report.metadata["lambda"] = num(lambda);
  report.metadata["coupling"] = num(V.coupling());

  double alpha_target = INFINITY, alpha_alt = 0.0;
  if (resonance) {
    alpha_target = coupling_to_alpha(lambda, *resonance);
    alpha_alt = INFINITY;
    report.target = "point_interaction";
    report.metadata["alpha"] = num(alpha_target);
    report.metadata["theta_star"] = num(resonance->theta_star);
    report.metadata["overlap"] = num(resonance->overlap);
  } else {
    report.target = "free";
    report.metadata["alpha_alt"] = num(alpha_alt);
  }
  const std::string guard = z_guard(
      region, z, resonance ? std::optional<double>(alpha_target) : std::optional<double>(alpha_alt),
      settings.eigenvalue_guard);

  const ScalingFamily family{V, lambda, eps};
  report.rows = run_rows(eps, [&](double e) -> ConvergenceRow {
    if (!guard.empty()) return invalid_row(e, guard);
    try {
      const RadialPotential Ve = scale_potential(family, e, region);
      const RadialGrid grid = settings.grid.build(Ve.support(), region, settings.annulus);
      const DiscreteResolvent K = kk_resolvent(region, z, Ve, grid);
      const DiscreteResolvent T =
          pi_resolvent(region, z, PointInteractionStrength(alpha_target), grid);
      const DiscreteResolvent A =
          pi_resolvent(region, z, PointInteractionStrength(alpha_alt), grid);
      ConvergenceRow row;
      row.eps = e;
      fill_norms(row, K, T, A, settings.annulus);
      row.scalar_gap = kNaN;
      return row;
    } catch (const SpectralPointError& err) {
      return invalid_row(e, err.what());
    } catch (const PoleError& err) {
      return invalid_row(e, err.what());
    } catch (const SingularCorrectionError& err) {
      return invalid_row(e, err.what());
    }
  });
  finish(report);
  return report;
}

ConvergenceReport sweep_free(const RadialPotential& V, double lambda,
                             const std::vector<double>& eps, const SpectralPoint& z,
                             const SweepSettings& settings,
                             const std::optional<ResonanceData>& resonance) {
  if (!settings.annulus)
    throw ParameterError("sweep_free: an annulus is required");
  if (!(settings.annulus->r1 > 0.0) || !(settings.annulus->r2 > settings.annulus->r1) ||
      settings.annulus->r2 > settings.grid.free_r_max)
    throw ParameterError("sweep_free: annulus must satisfy 0 < r1 < r2 <= r_max");
  ConvergenceReport report = sweep_local(FreeSpace{}, V, lambda, eps, z, settings, resonance);
  report.experiment = "free";
  return report;
}

ConvergenceReport sweep_nonlocal(const Region& region, const RadialPotential& rho,
                                 double alpha, const std::vector<double>& eps,
                                 const SpectralPoint& z, const SweepSettings& settings,
                                 NonlocalScaling scaling) {
  check_eps(eps);
  const RadialGrid base = settings.grid.build(rho.support(), region);
  const double ell = electrostatic_energy(rho, base);

  ConvergenceReport report;
  report.experiment = "nonlocal";
  report.target = scaling.correct ? "point_interaction" : "free";
  describe_common(report, region, z, settings);
  report.metadata["alpha"] = num(alpha);
  report.metadata["ell"] = num(ell);
  report.metadata["scaling"] =
      scaling.correct ? "correct" : "wrong(exponent=" + num(scaling.exponent) + ")";

  const std::string guard = z_guard(region, z, alpha, settings.eigenvalue_guard);
  const PointInteractionStrength a_inf = PointInteractionStrength::infinity();
  const PointInteractionStrength a_pi(alpha);

  report.rows = run_rows(eps, [&](double e) -> ConvergenceRow {
    if (!guard.empty()) return invalid_row(e, guard);
    try {
      const RadialPotential rho_e = dilate_density(rho, e);
      check_support(rho_e, region);
      const RadialGrid grid = settings.grid.build(rho_e.support(), region, settings.annulus);
      const double a = scaling.correct ? a_eps(e, alpha, ell)
                                       : -std::pow(e, scaling.exponent) / ell;
      const DiscreteResolvent H = nonlocal_resolvent(region, z, rho_e, a, grid);
      const DiscreteResolvent P = pi_resolvent(region, z, a_pi, grid);
      const DiscreteResolvent F = pi_resolvent(region, z, a_inf, grid);
      ConvergenceRow row;
      row.eps = e;
      if (scaling.correct)
        fill_norms(row, H, P, F, settings.annulus);
      else
        fill_norms(row, H, F, P, settings.annulus);
      const double target = alpha + z.kappa() / (4.0 * std::numbers::pi) -
                            correction_at_origin(region, z);
      row.scalar_gap = std::abs(-1.0 / a - H.parameters.at("pairing") - target);
      return row;
    } catch (const SpectralPointError& err) {
      return invalid_row(e, err.what());
    } catch (const PoleError& err) {
      return invalid_row(e, err.what());
    } catch (const SingularCorrectionError& err) {
      return invalid_row(e, err.what());
    }
  });
  finish(report);
  return report;
}

ConvergenceReport sector_check(const Region& region, const RadialPotential& V,
                               const std::vector<double>& eps, const SpectralPoint& z,
                               const SweepSettings& settings, int l) {
  check_eps(eps);
  if (l < 1) throw ParameterError("sector_check: sector must be >= 1");
  ConvergenceReport report;
  report.experiment = "sector";
  report.target = "free";
  describe_common(report, region, z, settings);
  report.metadata["sector"] = std::to_string(l);

  const ScalingFamily family{V, 0.0, eps};
  report.rows = run_rows(eps, [&](double e) -> ConvergenceRow {
    try {
      const RadialPotential Ve = scale_potential(family, e, region);
      const RadialGrid grid = settings.grid.build(Ve.support(), region, settings.annulus);
      const DiscreteResolvent K = kk_resolvent(region, z, Ve, grid, l);
      const DiscreteResolvent F = r0(region, z, grid, l);
      const DiscreteResolvent P =
          pi_resolvent(region, z, PointInteractionStrength(0.0), grid, l);
      ConvergenceRow row;
      row.eps = e;
      fill_norms(row, K, F, F, settings.annulus);
      row.norm_alt = op_norm_diff(P, F);
      row.scalar_gap = kNaN;
      return row;
    } catch (const SpectralPointError& err) {
      return invalid_row(e, err.what());
    }
  });
  finish(report);
  return report;
}

DichotomyCheck dichotomy(const ConvergenceReport& report) {
  DichotomyCheck out;
  out.floor = INFINITY;
  out.smallest_decaying = INFINITY;
  for (const auto& r : report.rows) {
    if (!r.valid) continue;
    out.floor = std::min(out.floor, r.norm_alt);
    out.smallest_decaying = std::min(out.smallest_decaying, r.norm_l0);
  }
  out.ratio = out.floor / out.smallest_decaying;
  return out;
}

bool decreasing_tail(const ConvergenceReport& report,
                     const std::function<double(const ConvergenceRow&)>& column,
                     int count) {
  std::vector<double> values;
  for (const auto& r : report.rows)
    if (r.valid) values.push_back(column(r));
  if (int(values.size()) < count) return false;
  for (std::size_t k = values.size() - count + 1; k < values.size(); ++k)
    if (!(values[k] < values[k - 1])) return false;
  return true;
}

}  // namespace deltalab
