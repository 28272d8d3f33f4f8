#include "deltalab/bsop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "deltalab/errors.hpp"
#include "deltalab/greens.hpp"
#include "deltalab/quadrature.hpp"

namespace deltalab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxInverseIterations = 200;

std::vector<Eigen::Index> active_indices(const Eigen::MatrixXd& M) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    if (M.row(i).cwiseAbs().maxCoeff() > 0.0 || M.col(i).cwiseAbs().maxCoeff() > 0.0)
      idx.push_back(i);
  return idx;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& M,
                          const std::vector<Eigen::Index>& idx) {
  const Eigen::Index m = Eigen::Index(idx.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) out(i, j) = M(idx[i], idx[j]);
  return out;
}

bool is_symmetric(const Eigen::MatrixXd& M) {
  const double scale = M.cwiseAbs().maxCoeff();
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1e-300);
}

}  // namespace

KernelOperator assemble_b0(const RadialPotential& V, const RadialGrid& grid,
                           int l) {
  if (V.support() > grid.r_max() * (1.0 + 1e-12))
    throw ParameterError("assemble_b0: support of V exceeds the grid range");
  auto [u, v] = split_uv(V, grid);
  Eigen::MatrixXd newton = assemble_folded(grid, newton_kernel(l));
  Eigen::MatrixXd B = u.asDiagonal() * newton * v.asDiagonal();
  std::ostringstream tag;
  tag << "B0(l=" << l << ")";
  return KernelOperator{grid, std::move(B), l, tag.str()};
}

KernelOperator assemble_b0(const RadialPotential& V, const RadialGrid& grid,
                           const Region& region, int l) {
  check_support(V, region);
  if (const auto* ball = std::get_if<BallDomain>(&region))
    if (grid.r_max() > ball->radius * (1.0 + 1e-12))
      throw ParameterError("assemble_b0: grid extends beyond the domain");
  return assemble_b0(V, grid, l);
}

std::vector<double> spectrum(const KernelOperator& B) {
  const auto idx = active_indices(B.matrix);
  std::vector<double> values;
  if (!idx.empty()) {
    Eigen::MatrixXd sub = submatrix(B.matrix, idx);
    if (is_symmetric(sub)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        values.push_back(es.eigenvalues()(i));
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> es(sub, false);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        values.push_back(es.eigenvalues()(i).real());
    }
  }
  for (std::size_t k = idx.size(); k < std::size_t(B.size()); ++k) values.push_back(0.0);
  std::sort(values.begin(), values.end());
  return values;
}

EigenPair eigen_near(const KernelOperator& B, double target) {
  const Eigen::MatrixXd& M = B.matrix;
  const Eigen::Index n = M.rows();
  if (n == 0 || M.cols() != n) throw ParameterError("eigen_near: empty or non-square operator");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff() * double(n));

  double shift = target;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M - shift * Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
    bool breakdown = false;
    double mu = target, residual = 0.0;
    int it = 0;
    for (; it < kMaxInverseIterations; ++it) {
      Eigen::VectorXd y = lu.solve(x);
      if (!y.allFinite() || y.norm() == 0.0) {
        breakdown = true;
        break;
      }
      x = y / y.norm();
      Eigen::VectorXd Mx = M * x;
      mu = x.dot(Mx);
      residual = (Mx - mu * x).norm();
      if (residual <= 1e-13 * scale) break;
    }
    if (breakdown) {
      shift = target + 1e-10 * (1.0 + std::abs(target)) * std::pow(10.0, attempt);
      continue;
    }
    if (residual > 1e-8)
      throw ConvergenceError("eigen_near: inverse iteration did not converge", residual);

    EigenPair out;
    out.value = mu;
    out.vector = B.grid.unfold(x);
    out.residual = residual;
    out.iterations = it + 1;
    out.sector = B.sector;

    const std::vector<double> all = spectrum(B);
    std::vector<double> dist(all.size());
    std::transform(all.begin(), all.end(), dist.begin(),
                   [&](double e) { return std::abs(e - target); });
    std::vector<std::size_t> order(all.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    out.second_nearest = order.size() > 1 ? all[order[1]] : std::nan("");
    return out;
  }
  throw ConvergenceError("eigen_near: factorization broke down after 3 shifts", INFINITY);
}

double overlap_with_v(const RadialPotential& V, const RadialGrid& grid,
                      const Eigen::VectorXd& f, int sector) {
  if (sector != 0) return 0.0;
  const Eigen::VectorXd v = split_uv(V, grid).second;
  return grid.inner(v, f);
}

ResonanceData tune_resonance(const RadialPotential& V, const RadialGrid& grid) {
  const RadialPotential unit = V.with_coupling(1.0);
  const KernelOperator B1 = assemble_b0(unit, grid);
  const std::vector<double> eig = spectrum(B1);
  const double mu1 = eig.front();
  if (!(mu1 < 0.0))
    throw NoResonanceError("tune_resonance: B_0 has no negative eigenvalue at unit coupling");

  ResonanceData res;
  res.mu_unit = mu1;
  res.theta_star = -1.0 / mu1;
  res.potential = V.with_coupling(res.theta_star);
  res.grid = grid;
  res.experimental = !V.sign_definite();

  const KernelOperator B = assemble_b0(res.potential, grid);
  res.pair = eigen_near(B, -1.0);
  res.overlap = overlap_with_v(res.potential, grid, res.pair.vector);
  if (res.overlap < 0.0) {
    res.pair.vector = -res.pair.vector;
    res.overlap = -res.overlap;
  }
  res.gap = std::abs(res.pair.second_nearest + 1.0);
  res.degenerate = !(res.gap > kSimplicityGap);
  return res;
}

double coupling_to_alpha(double lambda, const ResonanceData& res) {
  const Eigen::VectorXd v = split_uv(res.potential, res.grid).second;
  const double vnorm = std::sqrt(res.grid.inner(v, v));
  if (std::abs(res.overlap) < kOverlapThreshold * vnorm)
    throw OrthogonalResonanceError(
        "coupling_to_alpha: <v, phi> vanishes, the limit is the free operator");
  if (lambda == 0.0) return 0.0;
  return -lambda / (res.overlap * res.overlap);
}

NewtonTransform::NewtonTransform(RadialGrid grid, Eigen::VectorXd g)
    : grid_(std::move(grid)), g_(std::move(g)), charge_(grid_.integrate(g_)) {
  if (g_.size() != grid_.size()) throw ParameterError("NewtonTransform: size mismatch");
}

double NewtonTransform::operator()(double r) const {
  if (!(r > 0.0)) throw ParameterError("NewtonTransform: r must be positive");
  const int p = grid_.nodes_per_panel();
  const Eigen::VectorXd& s = grid_.nodes();
  const Eigen::VectorXd& w = grid_.dr_weights();
  if (r >= grid_.r_max()) return charge_ / (4.0 * kPi * r);

  const int kr = grid_.panel_of(r);
  double inner = 0.0, outer = 0.0;  // int_0^r g s^2 ds, int_r^inf g s ds
  for (int k = 0; k < grid_.panel_count(); ++k) {
    if (k == kr) continue;
    const Eigen::Index b = grid_.panel_begin(k);
    for (int i = 0; i < p; ++i) {
      const double term = w(b + i) * g_(b + i) * s(b + i);
      if (k < kr)
        inner += term * s(b + i);
      else
        outer += term;
    }
  }
  const Eigen::VectorXd local = g_.segment(grid_.panel_begin(kr), p);
  const GaussRule lo = gauss_legendre(p, grid_.panel_lo(kr), r);
  const GaussRule hi = gauss_legendre(p, r, grid_.panel_hi(kr));
  for (int i = 0; i < p; ++i) {
    const double a = lo.nodes(i);
    inner += lo.weights(i) * grid_.panel_basis(kr, a).dot(local) * a * a;
    const double c = hi.nodes(i);
    outer += hi.weights(i) * grid_.panel_basis(kr, c).dot(local) * c;
  }
  return inner / r + outer;
}

double NewtonTransform::mass(double cutoff) const {
  if (!(cutoff > 0.0)) throw ParameterError("NewtonTransform::mass: cutoff must be positive");
  const double inner_top = std::min(cutoff, grid_.r_max());
  const GaussRule ref = gauss_legendre(24);
  double total = 0.0;
  std::vector<double> cuts;
  for (double b : grid_.breaks())
    if (b < inner_top) cuts.push_back(b);
  cuts.push_back(inner_top);
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    const double half = 0.5 * (cuts[k] - cuts[k - 1]);
    for (Eigen::Index i = 0; i < ref.nodes.size(); ++i) {
      const double r = cuts[k - 1] + half * (ref.nodes(i) + 1.0);
      const double psi = (*this)(r);
      total += half * ref.weights(i) * psi * psi * 4.0 * kPi * r * r;
    }
  }
  if (cutoff > grid_.r_max())  // psi = charge / (4 pi r) exactly
    total += charge_ * charge_ * (cutoff - grid_.r_max()) / (4.0 * kPi);
  return total;
}

ResonanceProfile resonance_profile(const RadialPotential& V,
                                   const RadialGrid& grid,
                                   const Eigen::VectorXd& phi,
                                   const std::vector<double>& r_out) {
  if (r_out.empty()) throw ParameterError("resonance_profile: no sample radii");
  const Eigen::VectorXd v = split_uv(V, grid).second;
  NewtonTransform psi(grid, (v.array() * phi.array()).matrix());
  ResonanceProfile out;
  out.r = r_out;
  for (double r : r_out) out.psi.push_back(psi(r));
  const auto last = std::max_element(r_out.begin(), r_out.end()) - r_out.begin();
  out.tail_constant = 4.0 * kPi * r_out[last] * out.psi[last];
  out.overlap = grid.inner(v, phi);
  out.defect = std::abs(out.tail_constant - out.overlap);
  return out;
}

ResonanceProfile resonance_profile(const ResonanceData& res,
                                   const std::vector<double>& r_out) {
  return resonance_profile(res.potential, res.grid, res.pair.vector, r_out);
}

DistributionalResidual distributional_residual(const ResonanceData& res,
                                               const std::vector<double>& points,
                                               double h) {
  const Eigen::VectorXd v = split_uv(res.potential, res.grid).second;
  NewtonTransform psi(res.grid, (v.array() * res.pair.vector.array()).matrix());
  DistributionalResidual out;
  for (double r : points) {
    if (!(r - h > 0.0)) throw ParameterError("distributional_residual: r - h must be positive");
    const double chi_m = (r - h) * psi(r - h);
    const double chi_0 = r * psi(r);
    const double chi_p = (r + h) * psi(r + h);
    const double laplacian = -(chi_p - 2.0 * chi_0 + chi_m) / (h * h) / r;
    const double potential_term = res.potential(r) * psi(r);
    out.max_residual = std::max(out.max_residual, std::abs(laplacian + potential_term));
    out.max_potential_term = std::max(out.max_potential_term, std::abs(potential_term));
  }
  return out;
}

LocalizationReport verify_localization(const ResonanceData& res) {
  const RadialGrid extended =
      extend_grid(res.grid, 2.0 * res.grid.r_max(), std::max(4, res.grid.panel_count() / 2));
  const KernelOperator inside = assemble_b0(res.potential, res.grid);
  const KernelOperator outside = assemble_b0(res.potential, extended);

  LocalizationReport report;
  const Eigen::Index n = inside.size();
  report.kernel_discrepancy =
      (inside.matrix - outside.matrix.topLeftCorner(n, n)).cwiseAbs().maxCoeff();
  report.kernel_discrepancy = std::max(
      report.kernel_discrepancy, outside.matrix.bottomRows(outside.size() - n).cwiseAbs().maxCoeff());

  const std::vector<double> a = spectrum(inside), b = spectrum(outside);
  // nonzero parts of both spectra must coincide
  std::vector<double> na, nb;
  for (double e : a)
    if (e != 0.0) na.push_back(e);
  for (double e : b)
    if (e != 0.0) nb.push_back(e);
  if (na.size() != nb.size()) {
    report.eigenvalue_discrepancy = INFINITY;
  } else {
    for (std::size_t k = 0; k < na.size(); ++k)
      report.eigenvalue_discrepancy =
          std::max(report.eigenvalue_discrepancy, std::abs(na[k] - nb[k]));
  }

  const EigenPair pair = eigen_near(outside, -1.0);
  report.extended_eigenvalue = pair.value;
  const auto [u, v] = split_uv(res.potential, extended);
  for (Eigen::Index i = 0; i < extended.size(); ++i)
    if (u(i) == 0.0)
      report.outside_mass += extended.weights()(i) * pair.vector(i) * pair.vector(i);
  return report;
}

}  // namespace deltalab
