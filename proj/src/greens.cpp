#include "deltalab/greens.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "deltalab/errors.hpp"

namespace deltalab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerate = 1e-14;
constexpr double kMaxExponent = 350.0;

// Modified spherical Bessel functions, i_0 = sinh x / x, k_0 = exp(-x) / x.
double sph_i(int l, double x) {
  if (l == -1) return std::cosh(x) / x;
  return std::sqrt(kPi / (2.0 * x)) * std::cyl_bessel_i(l + 0.5, x);
}
double sph_k(int l, double x) {
  if (l == -1) l = 0;
  return std::sqrt(2.0 / (kPi * x)) * std::cyl_bessel_k(l + 0.5, x);
}

// Reduced boundary functional for chi = r psi, proportional to sigma(psi).
double reduced_sigma(const BallDomain& domain, double value, double derivative) {
  if (domain.bc.is_dirichlet()) return value;
  return derivative + (domain.bc.b - 1.0) / domain.radius * value;
}

double reduced_sigma_scale(const BallDomain& domain, double value,
                           double derivative) {
  if (domain.bc.is_dirichlet()) return std::abs(value);
  return std::abs(derivative) +
         std::abs((domain.bc.b - 1.0) / domain.radius * value);
}

[[noreturn]] void singular(const BallDomain& domain, const SpectralPoint& z) {
  std::ostringstream os;
  os.precision(17);
  os << "boundary correction is singular at z = " << z.z() << ", b = " << domain.bc.b
     << " (z is an eigenvalue of -Delta_sigma)";
  throw SingularCorrectionError(os.str());
}

void check_exponent(const BallDomain& domain, const SpectralPoint& z) {
  if (z.kappa() * domain.radius > kMaxExponent)
    throw ParameterError("kappa * R too large for the ball Green function");
}

}  // namespace

double free_gamma(const SpectralPoint& z, double r) {
  if (!(r > 0.0)) throw ParameterError("free_gamma: r must be positive");
  return std::exp(-z.kappa() * r) / (4.0 * kPi * r);
}

double CorrectionL0::operator()(double r) const {
  if (r == 0.0) return at_origin();
  return coefficient * std::sinh(kappa * r) / r;
}

double apply_sigma(const BallDomain& domain, double value, double derivative) {
  if (domain.bc.is_dirichlet()) return value;
  return derivative + domain.bc.b / domain.radius * value;
}

CorrectionL0 correction_l0(const BallDomain& domain, const SpectralPoint& z) {
  check_exponent(domain, z);
  const double R = domain.radius;
  const double k = z.kappa();
  const double e = std::exp(-k * R);
  const double gamma = e / (4.0 * kPi * R);
  const double dgamma = -e * (k * R + 1.0) / (4.0 * kPi * R * R);
  const double s = std::sinh(k * R) / R;
  const double ds = (k * R * std::cosh(k * R) - std::sinh(k * R)) / (R * R);

  const double denom = apply_sigma(domain, s, ds);
  const double scale = domain.bc.is_dirichlet()
                           ? std::abs(s)
                           : std::abs(ds) + std::abs(domain.bc.b / R * s);
  if (std::abs(denom) < kDegenerate * scale) singular(domain, z);
  return CorrectionL0{-apply_sigma(domain, gamma, dgamma) / denom, k};
}

double boundary_residual(const BallDomain& domain, const SpectralPoint& z,
                         const CorrectionL0& h) {
  const double R = domain.radius;
  const double k = z.kappa();
  const double e = std::exp(-k * R);
  const double value = e / (4.0 * kPi * R) + h(R);
  const double derivative = -e * (k * R + 1.0) / (4.0 * kPi * R * R) +
                            h.coefficient * (k * R * std::cosh(k * R) - std::sinh(k * R)) /
                                (R * R);
  return apply_sigma(domain, value, derivative);
}

double point_green(const Region& region, const SpectralPoint& z, double r) {
  const double g = free_gamma(z, r);
  if (const auto* ball = std::get_if<BallDomain>(&region))
    return g + correction_l0(*ball, z)(r);
  return g;
}

double correction_at_origin(const Region& region, const SpectralPoint& z) {
  if (const auto* ball = std::get_if<BallDomain>(&region))
    return correction_l0(*ball, z).at_origin();
  return 0.0;
}

double SectorSolutions::regular(double r) const {
  if (l == 0) return std::sinh(kappa * r);
  return r * sph_i(l, kappa * r);
}

double SectorSolutions::regular_derivative(double r) const {
  if (l == 0) return kappa * std::cosh(kappa * r);
  const double x = kappa * r;
  const double di = sph_i(l - 1, x) - (l + 1.0) / x * sph_i(l, x);
  return sph_i(l, x) + x * di;
}

double SectorSolutions::decaying(double r) const {
  if (l == 0) return std::exp(-kappa * r);
  return r * sph_k(l, kappa * r);
}

double SectorSolutions::decaying_derivative(double r) const {
  if (l == 0) return -kappa * std::exp(-kappa * r);
  const double x = kappa * r;
  const double dk = -sph_k(l - 1, x) - (l + 1.0) / x * sph_k(l, x);
  return sph_k(l, x) + x * dk;
}

double SectorSolutions::wronskian() const {
  return l == 0 ? -kappa : -1.0 / kappa;
}

SemiSeparableKernel sector_green(const Region& region, const SpectralPoint& z,
                                 int l) {
  if (l < 0) throw ParameterError("sector_green: l must be >= 0");
  const SectorSolutions sol{l, z.kappa()};
  const double norm = -1.0 / sol.wronskian();
  double mix = 0.0;
  if (const auto* ball = std::get_if<BallDomain>(&region)) {
    check_exponent(*ball, z);
    const double R = ball->radius;
    const double reg = sol.regular(R), dreg = sol.regular_derivative(R);
    const double dec = sol.decaying(R), ddec = sol.decaying_derivative(R);
    const double denom = reduced_sigma(*ball, reg, dreg);
    if (std::abs(denom) < kDegenerate * reduced_sigma_scale(*ball, reg, dreg))
      singular(*ball, z);
    mix = -reduced_sigma(*ball, dec, ddec) / denom;
  }
  return SemiSeparableKernel{
      [sol](double r) { return sol.regular(r); },
      [sol, mix, norm](double r) {
        return norm * (sol.decaying(r) + mix * sol.regular(r));
      }};
}

SemiSeparableKernel newton_kernel(int l) {
  if (l < 0) throw ParameterError("newton_kernel: l must be >= 0");
  const double c = 1.0 / (2.0 * l + 1.0);
  return SemiSeparableKernel{[l, c](double r) { return c * std::pow(r, l + 1); },
                             [l](double r) { return std::pow(r, -l); }};
}

double green_value(const Region& region, const SpectralPoint& z, int l,
                   double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) throw ParameterError("green_value: r must be positive");
  return sector_green(region, z, l)(r, s) / (4.0 * kPi * r * s);
}

KernelOperator green_kernel_l(const Region& region, const SpectralPoint& z,
                              const RadialGrid& grid, int l) {
  if (const auto* ball = std::get_if<BallDomain>(&region))
    if (grid.r_max() > ball->radius * (1.0 + 1e-12))
      throw ParameterError("green kernel: grid extends beyond the ball");
  std::ostringstream tag;
  tag.precision(17);
  tag << "resolvent0(" << describe(region) << ", z=" << z.z() << ", l=" << l << ")";
  return KernelOperator{grid, assemble_folded(grid, sector_green(region, z, l)), l,
                        tag.str()};
}

KernelOperator green_kernel_l0(const Region& region, const SpectralPoint& z,
                               const RadialGrid& grid) {
  return green_kernel_l(region, z, grid, 0);
}

double d_alpha(const SpectralPoint& z, const PointInteractionStrength& alpha) {
  if (alpha.is_infinite()) return 0.0;
  const double denom = alpha.value() + z.kappa() / (4.0 * kPi);
  if (std::abs(denom) <= kDegenerate * (std::abs(alpha.value()) + z.kappa() / (4.0 * kPi)))
    throw PoleError("d_z(alpha): vanishing denominator, -z is an eigenvalue of -Delta_alpha");
  return 1.0 / denom;
}

double c_alpha(const BallDomain& domain, const SpectralPoint& z,
               const PointInteractionStrength& alpha) {
  if (alpha.is_infinite()) return 0.0;
  const double h0 = correction_l0(domain, z).at_origin();
  const double denom = alpha.value() + z.kappa() / (4.0 * kPi) - h0;
  const double scale = std::abs(alpha.value()) + z.kappa() / (4.0 * kPi) + std::abs(h0);
  if (std::abs(denom) <= kDegenerate * scale)
    throw PoleError(
        "c_z(alpha): vanishing denominator, -z is an eigenvalue of -Delta_{alpha,sigma}");
  return 1.0 / denom;
}

double point_coefficient(const Region& region, const SpectralPoint& z,
                         const PointInteractionStrength& alpha) {
  if (const auto* ball = std::get_if<BallDomain>(&region))
    return c_alpha(*ball, z, alpha);
  return d_alpha(z, alpha);
}

std::optional<double> negative_boundary_eigenvalue(const BallDomain& domain) {
  if (domain.bc.is_dirichlet() || domain.bc.b >= 0.0) return std::nullopt;
  // sinh(kappa r) satisfies the condition iff x coth x = 1 - b, x = kappa R
  const double target = 1.0 - domain.bc.b;
  auto f = [&](double x) { return x / std::tanh(x) - target; };
  double lo = 1e-8, hi = target + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  const double kappa = 0.5 * (lo + hi) / domain.radius;
  return -kappa * kappa;
}

double admissible_z_floor(const Region& region) {
  if (const auto* ball = std::get_if<BallDomain>(&region))
    if (auto e = negative_boundary_eigenvalue(*ball)) return -*e;
  return 0.0;
}

}  // namespace deltalab
