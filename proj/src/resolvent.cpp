#include "deltalab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "deltalab/bsop.hpp"
#include "deltalab/greens.hpp"

namespace deltalab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Eigen::Index> support_nodes(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) idx.push_back(i);
  return idx;
}

// Three-point Lagrange weights for f' and f'' at x0 from nodes x.
void stencil(const double x[3], double x0, double d1[3], double d2[3]) {
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const double den = (x[a] - x[b]) * (x[a] - x[c]);
    d1[a] = ((x0 - x[b]) + (x0 - x[c])) / den;
    d2[a] = 2.0 / den;
  }
}

}  // namespace

DiscreteResolvent r0(const Region& region, const SpectralPoint& z,
                     const RadialGrid& grid, int l) {
  KernelOperator G = green_kernel_l(region, z, grid, l);
  DiscreteResolvent out;
  out.grid = grid;
  out.matrix = std::move(G.matrix);
  out.sector = l;
  out.z = z.z();
  out.kind = "free";
  out.region = describe(region);
  return out;
}

DiscreteResolvent kk_resolvent(const Region& region, const SpectralPoint& z,
                               const RadialPotential& V, const RadialGrid& grid,
                               int l) {
  check_support(V, region);
  DiscreteResolvent out = r0(region, z, grid, l);
  out.kind = "kk";
  out.parameters["coupling"] = V.coupling();
  out.parameters["support"] = V.support();

  const auto [u, v] = split_uv(V, grid);
  const std::vector<Eigen::Index> s = support_nodes(v);
  if (s.empty()) return out;
  const Eigen::Index m = Eigen::Index(s.size());

  const Eigen::MatrixXd& S = out.matrix;
  Eigen::MatrixXd cols(S.rows(), m), rows(m, S.cols());
  Eigen::VectorXd us(m), vs(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    cols.col(k) = S.col(s[k]);
    rows.row(k) = S.row(s[k]);
    us(k) = u(s[k]);
    vs(k) = v(s[k]);
  }
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) K(i, j) = us(i) * S(s[i], s[j]) * vs(j);
  K.diagonal().array() += 1.0;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  const double smin = svd.singularValues().minCoeff();
  if (smin < kBirmanSchwingerFloor) {
    std::ostringstream os;
    os << "kk_resolvent: 1 + u R0 v is singular (sigma_min = " << smin
       << "); -z is an eigenvalue of -Delta_sigma + V, move z";
    throw SpectralPointError(os.str());
  }
  const Eigen::MatrixXd X = K.partialPivLu().solve(us.asDiagonal() * rows);
  out.matrix -= cols * vs.asDiagonal() * X;
  out.parameters["sigma_min"] = smin;
  return out;
}

RankOneUpdate point_update(const Region& region, const SpectralPoint& z,
                           const PointInteractionStrength& alpha,
                           const RadialGrid& grid) {
  RankOneUpdate up;
  up.c = point_coefficient(region, z, alpha);
  up.g.resize(grid.size());
  if (const auto* ball = std::get_if<BallDomain>(&region)) {
    const CorrectionL0 h = correction_l0(*ball, z);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      up.g(i) = free_gamma(z, grid.nodes()(i)) + h(grid.nodes()(i));
  } else {
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      up.g(i) = free_gamma(z, grid.nodes()(i));
  }
  up.g = grid.fold(up.g);
  up.h = up.g;
  return up;
}

DiscreteResolvent pi_resolvent(const Region& region, const SpectralPoint& z,
                               const PointInteractionStrength& alpha,
                               const RadialGrid& grid, int l) {
  DiscreteResolvent out = r0(region, z, grid, l);
  out.kind = "point";
  out.parameters["alpha"] = alpha.value();
  if (l != 0) return out;
  const RankOneUpdate up = point_update(region, z, alpha, grid);
  out.parameters["coefficient"] = up.c;
  if (up.c != 0.0) out.matrix += up.dense();
  return out;
}

double pi_denominator(const Region& region, double alpha, double kappa) {
  double d = alpha + kappa / (4.0 * kPi);
  if (const auto* ball = std::get_if<BallDomain>(&region)) {
    // h_z(0) ~ exp(-2 kappa R) is far below rounding here
    if (kappa * ball->radius < 300.0)
      d -= correction_l0(*ball, SpectralPoint::from_kappa(kappa)).at_origin();
  }
  return d;
}

namespace {

// sigma(sinh(kappa r)/r) (alpha + kappa/(4 pi) - h_z(0)), scaled by 1/cosh(kappa R):
// the same roots as the denominator without the poles of h_z(0).
double regularized_denominator(const Region& region, double alpha, double kappa) {
  const double free = alpha + kappa / (4.0 * kPi);
  const auto* ball = std::get_if<BallDomain>(&region);
  if (!ball || kappa * ball->radius >= 300.0) return free;
  const double R = ball->radius;
  const double x = kappa * R;
  const double c = std::cosh(x);
  const double s = std::tanh(x) / R;
  const double ds = (x - std::tanh(x)) / (R * R);
  const double e = std::exp(-x) / c;
  const double gamma = e / (4.0 * kPi * R);
  const double dgamma = -e * (x + 1.0) / (4.0 * kPi * R * R);
  return free * apply_sigma(*ball, s, ds) + kappa * apply_sigma(*ball, gamma, dgamma);
}

}  // namespace

std::optional<double> pi_eigenvalue(const Region& region, double alpha,
                                    double e_max) {
  if (!std::isfinite(alpha)) return std::nullopt;
  if (!(e_max > 0.0)) throw ParameterError("pi_eigenvalue: e_max must be positive");
  const double k_max = std::sqrt(e_max);
  const double k_min = 1e-6 * std::min(1.0, k_max);
  constexpr int kScan = 4000;
  auto f = [&](double kappa) { return regularized_denominator(region, alpha, kappa); };

  // scan from the top: the lowest bound state has the largest kappa
  double k_hi = k_max, f_hi = f(k_hi);
  for (int i = 1; i <= kScan; ++i) {
    const double k_lo = k_max * std::pow(k_min / k_max, double(i) / kScan);
    const double f_lo = f(k_lo);
    if (f_hi == 0.0) return -k_hi * k_hi;
    if (std::signbit(f_hi) != std::signbit(f_lo)) {
      double a = k_lo, b = k_hi, fa = f_lo;
      for (int it = 0; it < 200 && b - a > 4e-16 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
        } else if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double root = 0.5 * (a + b);
      return -root * root;
    }
    k_hi = k_lo;
    f_hi = f_lo;
  }
  return std::nullopt;
}

double electrostatic_energy(const RadialPotential& rho, const RadialGrid& grid) {
  if (rho.support() > grid.r_max() * (1.0 + 1e-12))
    throw ParameterError("electrostatic_energy: density exceeds the grid range");
  const Eigen::VectorXd values = rho.sample(grid);
  const double mass = grid.integrate(values);
  if (std::abs(mass - 1.0) > 1e-10) {
    std::ostringstream os;
    os.precision(17);
    os << "electrostatic_energy: density has mass " << mass << ", expected 1";
    throw NormalizationError(os.str());
  }
  const NewtonTransform potential(grid, values);
  double energy = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    energy += grid.weights()(i) * values(i) * potential(grid.nodes()(i));
  return energy;
}

double uniform_ball_energy(double a) { return 3.0 / (10.0 * kPi * a); }

double a_eps(double eps, double alpha, double ell) {
  if (!(ell > 0.0)) throw ParameterError("a_eps: electrostatic energy must be positive");
  return -eps / ell + alpha * eps * eps / (ell * ell);
}

double density_pairing(const DiscreteResolvent& R0, const RadialPotential& rho) {
  const Eigen::VectorXd y = R0.grid.fold(rho.sample(R0.grid));
  return y.dot(R0.matrix * y);
}

DiscreteResolvent nonlocal_resolvent(const Region& region, const SpectralPoint& z,
                                     const RadialPotential& rho, double a,
                                     const RadialGrid& grid) {
  check_support(rho, region);
  DiscreteResolvent out = r0(region, z, grid, 0);
  out.kind = "nonlocal";
  out.parameters["a"] = a;
  if (a == 0.0) return out;
  const Eigen::VectorXd y = grid.fold(rho.sample(grid));
  const Eigen::VectorXd g = out.matrix * y;
  const double pairing = y.dot(g);
  const double denom = 1.0 / a + pairing;
  out.parameters["pairing"] = pairing;
  out.parameters["denominator"] = denom;
  if (std::abs(denom) <= 1e-12 * (std::abs(1.0 / a) + std::abs(pairing)))
    throw SpectralPointError(
        "nonlocal_resolvent: vanishing denominator, -z is an eigenvalue of H_eps");
  out.matrix -= (g * g.transpose()) / denom;
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> radial_differences(
    const RadialGrid& grid, const std::vector<Eigen::Index>& rows) {
  const Eigen::Index n = grid.size();
  if (n < 3) throw ParameterError("radial_differences: need at least 3 nodes");
  const Eigen::VectorXd& r = grid.nodes();
  Eigen::MatrixXd D1 = Eigen::MatrixXd::Zero(Eigen::Index(rows.size()), n);
  Eigen::MatrixXd D2 = D1;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Eigen::Index i = rows[k];
    const Eigen::Index c = std::clamp<Eigen::Index>(i, 1, n - 2);
    const double x[3] = {r(c - 1), r(c), r(c + 1)};
    double d1[3], d2[3];
    stencil(x, r(i), d1, d2);
    for (int a = 0; a < 3; ++a) {
      D1(Eigen::Index(k), c - 1 + a) = d1[a];
      D2(Eigen::Index(k), c - 1 + a) = d2[a];
    }
  }
  return {D1, D2};
}

double op_norm_diff(const RadialGrid& grid, const Eigen::MatrixXd& A,
                    const Eigen::MatrixXd& B, std::optional<Annulus> annulus,
                    NormKind kind) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != grid.size())
    throw ParameterError("op_norm_diff: operators live on different grids");
  const Eigen::MatrixXd D = A - B;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.nodes()(i);
    if (!annulus || (r >= annulus->r1 && r <= annulus->r2)) rows.push_back(i);
  }
  if (rows.empty()) throw ParameterError("op_norm_diff: annulus contains no grid nodes");
  const Eigen::Index m = Eigen::Index(rows.size());
  Eigen::MatrixXd restricted(m, D.cols());
  for (Eigen::Index k = 0; k < m; ++k) restricted.row(k) = D.row(rows[k]);
  if (kind == NormKind::L2) return largest_singular_value(restricted);

  // nodal output, then value / slope / curvature rows weighted by sqrt(w)
  const Eigen::MatrixXd nodal = grid.sqrt_weights().cwiseInverse().asDiagonal() * D;
  const auto [D1, D2] = radial_differences(grid, rows);
  Eigen::VectorXd sw(m);
  for (Eigen::Index k = 0; k < m; ++k) sw(k) = grid.sqrt_weights()(rows[k]);
  Eigen::MatrixXd stacked(3 * m, D.cols());
  stacked.topRows(m) = restricted;
  stacked.middleRows(m, m) = sw.asDiagonal() * (D1 * nodal);
  stacked.bottomRows(m) = sw.asDiagonal() * (D2 * nodal);
  return largest_singular_value(stacked);
}

double op_norm_diff(const DiscreteResolvent& A, const DiscreteResolvent& B,
                    std::optional<Annulus> annulus, NormKind kind) {
  if (!(A.grid == B.grid)) throw ParameterError("op_norm_diff: grids differ");
  return op_norm_diff(A.grid, A.matrix, B.matrix, annulus, kind);
}

}  // namespace deltalab
