#include "deltalab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "deltalab/errors.hpp"

namespace deltalab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json fit_json(const std::optional<RateFit>& fit, double threshold) {
  if (!fit) return nullptr;
  return json{{"slope", fit->slope},
              {"intercept", fit->intercept},
              {"r2", fit->r2},
              {"points", fit->points},
              {"meets_threshold", fit->slope >= threshold}};
}

template <class T>
void put(std::ostream& os, const T& x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T x;
  if (!is.read(reinterpret_cast<char*>(&x), sizeof(T)))
    throw ParameterError("kernel file truncated");
  return x;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json to_json(const RadialPotential& V) {
  json j;
  std::visit(overloaded{
                 [&](const SquareWell& p) {
                   j["profile"] = "square_well";
                   j["sign"] = p.sign;
                 },
                 [&](const TruncatedGaussian& p) {
                   j["profile"] = "gaussian";
                   j["sign"] = p.sign;
                   j["width"] = p.width;
                 },
                 [&](const Tabulated& p) {
                   j["profile"] = "tabulated";
                   j["r"] = p.r;
                   j["values"] = p.values;
                 },
             },
             V.profile());
  j["support"] = V.base_support();
  j["coupling"] = V.coupling();
  j["length_scale"] = V.length_scale();
  return j;
}

RadialPotential potential_from_json(const json& j) {
  const std::string kind = j.at("profile").get<std::string>();
  Profile profile;
  if (kind == "square_well")
    profile = SquareWell{j.value("sign", -1)};
  else if (kind == "gaussian")
    profile = TruncatedGaussian{j.value("sign", -1), j.at("width").get<double>()};
  else if (kind == "tabulated")
    profile = Tabulated{j.at("r").get<std::vector<double>>(),
                        j.at("values").get<std::vector<double>>()};
  else
    throw ParameterError("unknown potential profile '" + kind + "'");
  return RadialPotential(std::move(profile), j.at("support").get<double>(),
                         j.value("coupling", 1.0), j.value("length_scale", 1.0));
}

json to_json(const RadialGrid& grid) {
  return json{{"breaks", grid.breaks()},
              {"nodes_per_panel", grid.nodes_per_panel()},
              {"nodes", vector_json(grid.nodes())},
              {"weights", vector_json(grid.weights())}};
}

RadialGrid grid_from_json(const json& j) {
  RadialGrid grid(j.at("breaks").get<std::vector<double>>(),
                  j.at("nodes_per_panel").get<int>());
  if (j.contains("nodes")) {
    const auto nodes = j.at("nodes").get<std::vector<double>>();
    if (Eigen::Index(nodes.size()) != grid.size())
      throw ParameterError("grid json: node count does not match breaks");
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      if (std::abs(nodes[i] - grid.nodes()(i)) > 1e-14 * grid.r_max())
        throw ParameterError("grid json: nodes do not match breaks");
  }
  return grid;
}

json to_json(const Region& region) {
  return std::visit(overloaded{
                        [](const FreeSpace&) { return json{{"type", "free"}}; },
                        [](const BallDomain& b) {
                          json bc{{"kind", b.bc.is_dirichlet() ? "dirichlet" : "robin"}};
                          if (!b.bc.is_dirichlet()) bc["b"] = b.bc.b;
                          return json{{"type", "ball"}, {"radius", b.radius}, {"bc", bc}};
                        },
                    },
                    region);
}

Region region_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "free") return FreeSpace{};
  if (type != "ball") throw ParameterError("unknown region type '" + type + "'");
  const json& bc = j.at("bc");
  const std::string kind = bc.at("kind").get<std::string>();
  BoundaryCondition cond;
  if (kind == "dirichlet")
    cond = BoundaryCondition::dirichlet();
  else if (kind == "neumann")
    cond = BoundaryCondition::neumann();
  else if (kind == "robin")
    cond = BoundaryCondition::robin(bc.at("b").get<double>());
  else
    throw ParameterError("unknown boundary condition '" + kind + "'");
  return BallDomain(j.at("radius").get<double>(), cond);
}

json to_json(const ResonanceData& res, const std::vector<double>& lambdas) {
  json alphas = json::array();
  for (double lambda : lambdas) {
    json entry{{"lambda", lambda}};
    try {
      entry["alpha"] = coupling_to_alpha(lambda, res);
    } catch (const OrthogonalResonanceError&) {
      entry["alpha"] = "infinity";
    }
    alphas.push_back(entry);
  }
  return json{{"theta_star", res.theta_star},
              {"mu_unit", res.mu_unit},
              {"eigenvalue", res.pair.value},
              {"residual", res.pair.residual},
              {"iterations", res.pair.iterations},
              {"second_nearest", number(res.pair.second_nearest)},
              {"gap", res.gap},
              {"simple", !res.degenerate},
              {"experimental", res.experimental},
              {"overlap", res.overlap},
              {"alphas", alphas},
              {"potential", to_json(res.potential)},
              {"grid", json{{"breaks", res.grid.breaks()},
                            {"nodes_per_panel", res.grid.nodes_per_panel()}}}};
}

json to_json(const ConvergenceReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back(json{{"eps", r.eps},
                        {"norm_l0", number(r.norm_l0)},
                        {"norm_ann_l2", number(r.norm_ann_l2)},
                        {"norm_ann_h2", number(r.norm_ann_h2)},
                        {"scalar_gap", number(r.scalar_gap)},
                        {"norm_alt", number(r.norm_alt)},
                        {"valid", r.valid},
                        {"note", r.note}});
  const DichotomyCheck d = dichotomy(report);
  return json{{"experiment", report.experiment},
              {"target", report.target},
              {"metadata", report.metadata},
              {"slope_threshold", report.slope_threshold},
              {"rows", rows},
              {"fit",
               json{{"norm_l0", fit_json(report.fit_l0, report.slope_threshold)},
                    {"norm_ann_l2", fit_json(report.fit_ann_l2, report.slope_threshold)},
                    {"norm_ann_h2", fit_json(report.fit_ann_h2, report.slope_threshold)},
                    {"scalar_gap", fit_json(report.fit_gap, report.slope_threshold)},
                    {"norm_alt", fit_json(report.fit_alt, report.slope_threshold)}}},
              {"dichotomy", json{{"floor", number(d.floor)},
                                 {"smallest_decaying", number(d.smallest_decaying)},
                                 {"ratio", number(d.ratio)}}}};
}

void write_kernel_binary(std::ostream& os, const RadialGrid& grid,
                         const Eigen::MatrixXd& folded, int sector,
                         const std::string& hash) {
  const std::uint64_t n = std::uint64_t(grid.size());
  if (folded.rows() != grid.size() || folded.cols() != grid.size())
    throw ParameterError("write_kernel_binary: matrix does not match grid");
  os.write("DLK1", 4);
  put(os, n);
  put(os, std::int32_t(sector));
  std::string padded = hash.substr(0, 16);
  padded.resize(16, ' ');
  os.write(padded.data(), 16);
  for (Eigen::Index i = 0; i < grid.size(); ++i) put(os, grid.nodes()(i));
  for (Eigen::Index i = 0; i < grid.size(); ++i) put(os, grid.weights()(i));
  const Eigen::VectorXd& s = grid.sqrt_weights();
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    for (Eigen::Index j = 0; j < grid.size(); ++j)
      put(os, folded(i, j) * s(j) / s(i));
}

KernelFile read_kernel_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DLK1", 4) != 0)
    throw ParameterError("not a DLK1 kernel file");
  KernelFile k;
  const auto n = Eigen::Index(get<std::uint64_t>(is));
  k.sector = get<std::int32_t>(is);
  char hash[16];
  if (!is.read(hash, 16)) throw ParameterError("kernel file truncated");
  k.hash.assign(hash, 16);
  k.nodes.resize(n);
  k.weights.resize(n);
  k.nodal.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) k.nodes(i) = get<double>(is);
  for (Eigen::Index i = 0; i < n; ++i) k.weights(i) = get<double>(is);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k.nodal(i, j) = get<double>(is);
  return k;
}

json kernel_json(const RadialGrid& grid, const Eigen::MatrixXd& folded, int sector,
                 const std::string& tag) {
  const Eigen::VectorXd& s = grid.sqrt_weights();
  json rows = json::array();
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    std::vector<double> row(std::size_t(grid.size()));
    for (Eigen::Index j = 0; j < grid.size(); ++j) row[j] = folded(i, j) * s(j) / s(i);
    rows.push_back(row);
  }
  return json{{"tag", tag},
              {"sector", sector},
              {"layout", "row-major nodal kernel K(r_i, r_j) w_j"},
              {"grid", to_json(grid)},
              {"matrix", rows}};
}

void write_report_csv(std::ostream& os, const ConvergenceReport& report,
                      const std::string& hash) {
  os << "# config_hash: " << hash << "\n" << kReportColumns << "\n";
  for (const auto& r : report.rows)
    os << format_double(r.eps) << ',' << format_double(r.norm_l0) << ','
       << format_double(r.norm_ann_l2) << ',' << format_double(r.norm_ann_h2) << ','
       << format_double(r.scalar_gap) << ',' << (r.valid ? 1 : 0) << "\n";
}

void write_report_gnuplot(std::ostream& os, const ConvergenceReport& report,
                          const std::string& csv_name, const std::string& hash) {
  os << "# config_hash: " << hash << "\n"
     << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set key autotitle columnhead\n"
     << "set logscale xy\n"
     << "set xlabel 'eps'\n"
     << "set ylabel 'operator norm'\n"
     << "set title '" << report.experiment << " sweep, target " << report.target << "'\n"
     << "plot '" << csv_name << "' using 1:2 with linespoints";
  if (report.fit_ann_l2) os << ", '' using 1:3 with linespoints, '' using 1:4 with linespoints";
  if (report.fit_gap) os << ", '' using 1:5 with linespoints";
  os << "\n";
}

}  // namespace deltalab
