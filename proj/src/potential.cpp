#include "deltalab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "deltalab/errors.hpp"
#include "deltalab/quadrature.hpp"

namespace deltalab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_profile(const Profile& profile, double base_support) {
  std::visit(overloaded{
                 [](const SquareWell& p) {
                   if (p.sign != 1 && p.sign != -1)
                     throw ParameterError("SquareWell: sign must be +1 or -1");
                 },
                 [](const TruncatedGaussian& p) {
                   if (p.sign != 1 && p.sign != -1)
                     throw ParameterError("TruncatedGaussian: sign must be +1 or -1");
                   if (!(p.width > 0.0))
                     throw ParameterError("TruncatedGaussian: width must be positive");
                 },
                 [&](const Tabulated& p) {
                   if (p.r.size() < 2 || p.r.size() != p.values.size())
                     throw ParameterError("Tabulated: need >= 2 matching samples");
                   for (std::size_t k = 1; k < p.r.size(); ++k)
                     if (!(p.r[k] > p.r[k - 1]))
                       throw ParameterError("Tabulated: r must increase");
                   if (p.r.front() != 0.0 || std::abs(p.r.back() - base_support) >
                                                 1e-12 * base_support)
                     throw ParameterError("Tabulated: samples must span [0, support]");
                 },
             },
             profile);
}

}  // namespace

std::string BoundaryCondition::label() const {
  if (is_dirichlet()) return "dirichlet";
  if (b == 0.0) return "neumann";
  std::ostringstream os;
  os.precision(17);
  os << "robin(b=" << b << ")";
  return os.str();
}

std::string describe(const Region& region) {
  if (std::holds_alternative<FreeSpace>(region)) return "free";
  const auto& ball = std::get<BallDomain>(region);
  std::ostringstream os;
  os.precision(17);
  os << "ball(R=" << ball.radius << ", " << ball.bc.label() << ")";
  return os.str();
}

RadialPotential::RadialPotential(Profile profile, double base_support,
                                 double coupling, double length_scale)
    : profile_(std::move(profile)),
      base_support_(base_support),
      coupling_(coupling),
      length_scale_(length_scale) {
  if (!(base_support > 0.0) || !std::isfinite(base_support))
    throw ParameterError("RadialPotential: support must be positive");
  if (!(length_scale > 0.0) || !std::isfinite(length_scale))
    throw ParameterError("RadialPotential: length scale must be positive");
  if (!std::isfinite(coupling))
    throw ParameterError("RadialPotential: coupling must be finite");
  validate_profile(profile_, base_support_);
}

RadialPotential RadialPotential::square_well(double value, double support) {
  return RadialPotential(SquareWell{value < 0.0 ? -1 : 1}, support,
                         std::abs(value));
}

double RadialPotential::shape(double s) const {
  if (s > base_support_) return 0.0;
  return std::visit(
      overloaded{
          [](const SquareWell& p) { return double(p.sign); },
          [s](const TruncatedGaussian& p) {
            return p.sign * std::exp(-s * s / (2.0 * p.width * p.width));
          },
          [s](const Tabulated& p) {
            auto it = std::upper_bound(p.r.begin(), p.r.end(), s);
            if (it == p.r.end()) return p.values.back();
            const std::size_t k = std::size_t(it - p.r.begin());
            const double t = (s - p.r[k - 1]) / (p.r[k] - p.r[k - 1]);
            return (1.0 - t) * p.values[k - 1] + t * p.values[k];
          },
      },
      profile_);
}

double RadialPotential::operator()(double r) const {
  return coupling_ * shape(r / length_scale_);
}

Eigen::VectorXd RadialPotential::sample(const RadialGrid& grid) const {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = (*this)(grid.nodes()(i));
  return out;
}

RadialPotential RadialPotential::with_coupling(double coupling) const {
  return RadialPotential(profile_, base_support_, coupling, length_scale_);
}

bool RadialPotential::sign_definite() const {
  return std::visit(overloaded{
                        [](const SquareWell&) { return true; },
                        [](const TruncatedGaussian&) { return true; },
                        [](const Tabulated& p) {
                          bool pos = false, neg = false;
                          for (double v : p.values) {
                            pos |= v > 0.0;
                            neg |= v < 0.0;
                          }
                          return !(pos && neg);
                        },
                    },
                    profile_);
}

std::vector<double> RadialPotential::kinks() const {
  std::vector<double> out;
  if (const auto* tab = std::get_if<Tabulated>(&profile_))
    for (double r : tab->r) out.push_back(r * length_scale_);
  out.push_back(support());
  return out;
}

double RadialPotential::integral() const {
  std::vector<double> cuts = kinks();
  cuts.insert(cuts.begin(), 0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const GaussRule ref = gauss_legendre(24);
  constexpr int kSub = 32;
  double total = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    const double h = (cuts[k] - cuts[k - 1]) / kSub;
    for (int s = 0; s < kSub; ++s) {
      const double a = cuts[k - 1] + s * h;
      for (Eigen::Index i = 0; i < ref.nodes.size(); ++i) {
        const double r = a + 0.5 * h * (ref.nodes(i) + 1.0);
        total += 0.5 * h * ref.weights(i) * (*this)(r) * 4.0 * std::numbers::pi * r * r;
      }
    }
  }
  return total;
}

bool RadialPotential::operator==(const RadialPotential& o) const {
  if (base_support_ != o.base_support_ || coupling_ != o.coupling_ ||
      length_scale_ != o.length_scale_ || profile_.index() != o.profile_.index())
    return false;
  return std::visit(
      overloaded{
          [&](const SquareWell& p) { return p.sign == std::get<SquareWell>(o.profile_).sign; },
          [&](const TruncatedGaussian& p) {
            const auto& q = std::get<TruncatedGaussian>(o.profile_);
            return p.sign == q.sign && p.width == q.width;
          },
          [&](const Tabulated& p) {
            const auto& q = std::get<Tabulated>(o.profile_);
            return p.r == q.r && p.values == q.values;
          },
      },
      profile_);
}

void check_support(const RadialPotential& V, const Region& region) {
  if (const auto* ball = std::get_if<BallDomain>(&region)) {
    if (!(V.support() < ball->radius)) {
      std::ostringstream os;
      os << "support radius " << V.support() << " is not inside the ball of radius "
         << ball->radius;
      throw SupportError(os.str());
    }
  }
}

RadialPotential scale_potential(const ScalingFamily& family, double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw ParameterError("scale_potential: eps must lie in (0, 1]");
  const RadialPotential& V = family.base;
  const double factor = (1.0 + family.lambda * eps) / (eps * eps);
  return RadialPotential(V.profile(), V.base_support(), V.coupling() * factor,
                         V.length_scale() * eps);
}

RadialPotential scale_potential(const ScalingFamily& family, double eps,
                                const Region& region) {
  RadialPotential out = scale_potential(family, eps);
  check_support(out, region);
  return out;
}

RadialPotential dilate_density(const RadialPotential& rho, double eps) {
  if (!(eps > 0.0)) throw ParameterError("dilate_density: eps must be positive");
  return RadialPotential(rho.profile(), rho.base_support(),
                         rho.coupling() / (eps * eps * eps),
                         rho.length_scale() * eps);
}

RadialPotential normalize_density(const RadialPotential& rho) {
  const double mass = rho.integral();
  if (!(std::abs(mass) > 0.0))
    throw NormalizationError("normalize_density: density has zero mass");
  return rho.with_coupling(rho.coupling() / mass);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> split_uv(const RadialPotential& V,
                                                     const RadialGrid& grid) {
  const Eigen::VectorXd values = V.sample(grid);
  Eigen::VectorXd v = values.cwiseAbs().cwiseSqrt();
  Eigen::VectorXd u = v;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (values(i) < 0.0) u(i) = -u(i);
  return {u, v};
}

}  // namespace deltalab
