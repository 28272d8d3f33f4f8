#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deltalab/bsop.hpp"
#include "deltalab/domain.hpp"
#include "deltalab/potential.hpp"
#include "deltalab/resolvent.hpp"

namespace deltalab {

/// Per-eps grid recipe: `support_panels` uniform panels on (0, eps a], then
/// `outer_panels` geometric panels up to r_max. Annulus endpoints become
/// panel boundaries.
struct GridSpec {
  int support_panels = 6;
  int outer_panels = 16;
  int nodes_per_panel = 10;
  /// Grid range in free space; ignored on a ball (the radius is used).
  double free_r_max = 10.0;

  RadialGrid build(double edge, const Region& region,
                   std::optional<Annulus> annulus = std::nullopt) const;
};

struct SweepSettings {
  GridSpec grid;
  std::optional<Annulus> annulus;
  double slope_threshold = 0.8;
  /// Minimum distance between z and -E for a detected bound state E.
  double eigenvalue_guard = 1e-6;
};

struct ConvergenceRow {
  double eps = 0.0;
  double norm_l0 = 0.0;
  double norm_ann_l2 = 0.0;
  double norm_ann_h2 = 0.0;
  double scalar_gap = 0.0;
  /// Distance to the competing limit (free vs point interaction).
  double norm_alt = 0.0;
  bool valid = true;
  std::string note;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

struct ConvergenceReport {
  std::string experiment;
  /// "point_interaction" or "free".
  std::string target;
  std::vector<ConvergenceRow> rows;
  std::optional<RateFit> fit_l0, fit_ann_l2, fit_ann_h2, fit_gap, fit_alt;
  double slope_threshold = 0.8;
  std::map<std::string, std::string> metadata;

  bool all_valid() const;
};

/// Least squares of log(value) on log(eps) over valid rows.
/// Throws FitError for fewer than 4 rows or nonpositive values.
RateFit fit_rate(const std::vector<ConvergenceRow>& rows,
                 const std::function<double(const ConvergenceRow&)>& column);
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values);

/// -Delta_sigma + V_eps against its limit. With `resonance` the target is
/// the point interaction with alpha = -lambda |<v, phi>|^{-2} and V must be
/// the tuned potential; without it the target is the free operator and the
/// competing limit is the point interaction with alpha = 0.
ConvergenceReport sweep_local(const Region& region, const RadialPotential& V,
                              double lambda, const std::vector<double>& eps,
                              const SpectralPoint& z, const SweepSettings& settings,
                              const std::optional<ResonanceData>& resonance);

/// sweep_local in free space; the annulus is mandatory and must avoid 0.
ConvergenceReport sweep_free(const RadialPotential& V, double lambda,
                             const std::vector<double>& eps, const SpectralPoint& z,
                             const SweepSettings& settings,
                             const std::optional<ResonanceData>& resonance);

struct NonlocalScaling {
  /// Correct: a(eps) = -eps/ell + alpha eps^2/ell^2. Wrong: a = -eps^p/ell.
  bool correct = true;
  double exponent = 2.0;
};

/// Rank-one family with unit-mass density rho against the point
/// interaction (correct scaling) or the free operator (wrong scaling).
ConvergenceReport sweep_nonlocal(const Region& region, const RadialPotential& rho,
                                 double alpha, const std::vector<double>& eps,
                                 const SpectralPoint& z, const SweepSettings& settings,
                                 NonlocalScaling scaling);

/// ||kk_resolvent(V_eps) - r0|| in sector l; norm_alt holds ||pi - r0||,
/// which vanishes identically for l >= 1.
ConvergenceReport sector_check(const Region& region, const RadialPotential& V,
                               const std::vector<double>& eps, const SpectralPoint& z,
                               const SweepSettings& settings, int l = 1);

struct DichotomyCheck {
  double floor = 0.0;
  double smallest_decaying = 0.0;
  double ratio = 0.0;
};

/// Smallest distance to the competing limit vs. the smallest distance to
/// the target over valid rows.
DichotomyCheck dichotomy(const ConvergenceReport& report);

/// True when `column` decreases strictly across the last `count` valid rows.
bool decreasing_tail(const ConvergenceReport& report,
                     const std::function<double(const ConvergenceRow&)>& column,
                     int count = 3);

}  // namespace deltalab
