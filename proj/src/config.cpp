#include "deltalab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "deltalab/bsop.hpp"
#include "deltalab/greens.hpp"
#include "deltalab/resolvent.hpp"

namespace deltalab {

namespace fs = std::filesystem;

namespace {

using Keys = std::set<std::string>;

const Keys kCommon{"domain", "grid", "thresholds", "seed"};
const Keys kBs{"potential", "lambdas"};
const Keys kPi{"z", "alpha", "e_max", "kernel_export"};
const Keys kConverge{"mode",   "potential", "density",  "lambda", "alpha",  "z",
                     "eps",    "annulus",   "resonant", "detune", "scaling"};
const Keys kResonance{"potential", "radii", "synthetic_orthogonal", "residual_step"};

void only(const json& j, const Keys& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
T read(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": '" + key + "' is missing or has the wrong type");
  }
}

template <class T>
T read_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  return j.contains(key) ? read<T>(j, key, where) : fallback;
}

double read_alpha(const json& j) {
  const json& a = j.at("alpha");
  if (a.is_string()) {
    if (a.get<std::string>() == "infinity") return INFINITY;
    throw ConfigError("alpha: expected a number or \"infinity\"");
  }
  if (!a.is_number()) throw ConfigError("alpha: expected a number or \"infinity\"");
  return a.get<double>();
}

Region parse_region(const json& j) {
  only(j, {"type", "radius", "bc"}, "domain");
  const std::string type = read<std::string>(j, "type", "domain");
  if (type == "free") {
    if (j.contains("radius") || j.contains("bc"))
      throw ConfigError("domain: free space takes no radius or bc");
    return FreeSpace{};
  }
  if (type != "ball") throw ConfigError("domain: type must be \"ball\" or \"free\"");
  const json& bc = j.contains("bc") ? j.at("bc") : json{{"kind", "dirichlet"}};
  only(bc, {"kind", "b"}, "domain.bc");
  const std::string kind = read<std::string>(bc, "kind", "domain.bc");
  BoundaryCondition cond;
  if (kind == "dirichlet" || kind == "neumann") {
    if (bc.contains("b")) throw ConfigError("domain.bc: b is only valid for robin");
    cond = kind == "dirichlet" ? BoundaryCondition::dirichlet()
                               : BoundaryCondition::neumann();
  } else if (kind == "robin") {
    cond = BoundaryCondition::robin(read<double>(bc, "b", "domain.bc"));
  } else {
    throw ConfigError("domain.bc: kind must be dirichlet, neumann or robin");
  }
  return BallDomain(read<double>(j, "radius", "domain"), cond);
}

RadialPotential parse_profile(const json& j, const std::string& where) {
  only(j, {"profile", "sign", "width", "support", "coupling", "r", "values"}, where);
  const std::string kind = read<std::string>(j, "profile", where);
  const double support = read<double>(j, "support", where);
  const double coupling = read_or<double>(j, "coupling", 1.0, where);
  const int sign = read_or<int>(j, "sign", -1, where);
  if (sign != -1 && sign != 1) throw ConfigError(where + ": sign must be -1 or +1");
  Profile profile;
  if (kind == "square_well") {
    profile = SquareWell{sign};
  } else if (kind == "gaussian") {
    profile = TruncatedGaussian{sign, read<double>(j, "width", where)};
  } else if (kind == "tabulated") {
    profile = Tabulated{read<std::vector<double>>(j, "r", where),
                        read<std::vector<double>>(j, "values", where)};
  } else {
    throw ConfigError(where + ": profile must be square_well, gaussian or tabulated");
  }
  return RadialPotential(std::move(profile), support, coupling);
}

GridSpec parse_grid(const json& j) {
  only(j, {"support_panels", "outer_panels", "nodes_per_panel", "free_r_max"}, "grid");
  GridSpec g;
  g.support_panels = read_or<int>(j, "support_panels", g.support_panels, "grid");
  g.outer_panels = read_or<int>(j, "outer_panels", g.outer_panels, "grid");
  g.nodes_per_panel = read_or<int>(j, "nodes_per_panel", g.nodes_per_panel, "grid");
  g.free_r_max = read_or<double>(j, "free_r_max", g.free_r_max, "grid");
  if (g.support_panels < 1 || g.outer_panels < 1 || g.nodes_per_panel < 2 ||
      !(g.free_r_max > 0.0))
    throw ConfigError("grid: panel counts must be >= 1, nodes_per_panel >= 2");
  return g;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw ConfigError("write to '" + path.string() + "' failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RadialGrid potential_grid(const ExperimentConfig& cfg, const RadialPotential& V) {
  check_support(V, cfg.region);
  return cfg.grid.build(V.support(), cfg.region);
}

SweepSettings settings(const ExperimentConfig& cfg) {
  SweepSettings s;
  s.grid = cfg.grid;
  s.annulus = cfg.annulus;
  s.slope_threshold = cfg.slope_threshold;
  s.eigenvalue_guard = cfg.eigenvalue_guard;
  return s;
}

int cmd_bs(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const RadialGrid grid = potential_grid(cfg, *cfg.potential);
  const ResonanceData res = tune_resonance(*cfg.potential, grid);
  json j = to_json(res, cfg.lambdas);
  j["region"] = to_json(cfg.region);
  std::vector<double> head = spectrum(assemble_b0(cfg.potential->with_coupling(1.0), grid));
  head.resize(std::min<std::size_t>(head.size(), 5));
  j["unit_spectrum_head"] = head;
  j["config_hash"] = cfg.hash;
  write_file(out / "resonance.json", dump(j));
  log << "theta* = " << format_double(res.theta_star) << ", <v,phi> = "
      << format_double(res.overlap) << ", gap = " << format_double(res.gap) << "\n";
  if (res.degenerate) {
    log << "eigenvalue -1 is not simple (gap below " << kSimplicityGap << ")\n";
    return kExitDegenerate;
  }
  return kExitOk;
}

int cmd_pi(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const SpectralPoint z(cfg.z);
  const PointInteractionStrength alpha(cfg.alpha);
  json j{{"region", to_json(cfg.region)},
         {"z", cfg.z},
         {"alpha", std::isinf(cfg.alpha) ? json("infinity") : json(cfg.alpha)},
         {"h0", correction_at_origin(cfg.region, z)},
         {"config_hash", cfg.hash}};
  std::optional<double> E;
  if (!alpha.is_infinite()) E = pi_eigenvalue(cfg.region, cfg.alpha, cfg.e_max);
  j["eigenvalue"] = E ? json(*E) : json("none");
  log << "bound state: " << (E ? format_double(*E) : std::string("none")) << "\n";

  int code = kExitOk;
  if (E && std::abs(cfg.z + *E) < cfg.eigenvalue_guard) {
    j["coefficient"] = nullptr;
    j["note"] = "z is within the guard of -E; move z";
    code = kExitInvalidRows;
  } else {
    j["coefficient"] = point_coefficient(cfg.region, z, alpha);
    if (cfg.kernel_export != "none") {
      const double r_max = std::visit(
          [&](const auto& r) {
            if constexpr (std::is_same_v<std::decay_t<decltype(r)>, BallDomain>)
              return r.radius;
            else
              return cfg.grid.free_r_max;
          },
          cfg.region);
      const RadialGrid grid = cfg.grid.build(0.05 * r_max, cfg.region);
      const DiscreteResolvent R = pi_resolvent(cfg.region, z, alpha, grid);
      if (cfg.kernel_export == "binary") {
        std::ostringstream os(std::ios::binary);
        write_kernel_binary(os, grid, R.matrix, 0, cfg.hash);
        write_file(out / "pi_kernel.bin", os.str());
        j["kernel_file"] = "pi_kernel.bin";
      } else {
        json k = kernel_json(grid, R.matrix, 0, "pi_resolvent");
        k["config_hash"] = cfg.hash;
        write_file(out / "pi_kernel.json", dump(k));
        j["kernel_file"] = "pi_kernel.json";
      }
    }
  }
  write_file(out / "pi.json", dump(j));
  return code;
}

int cmd_converge(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const SpectralPoint z(cfg.z);
  const SweepSettings s = settings(cfg);
  ConvergenceReport report;
  if (cfg.mode == "nonlocal") {
    report = sweep_nonlocal(cfg.region, normalize_density(*cfg.density), cfg.alpha,
                            cfg.eps, z, s, cfg.scaling);
  } else {
    const Region region = cfg.mode == "free" ? Region(FreeSpace{}) : cfg.region;
    const RadialGrid base = cfg.grid.build(cfg.potential->support(), region);
    const ResonanceData res = tune_resonance(*cfg.potential, base);
    if (res.degenerate) {
      log << "eigenvalue -1 is not simple; degenerate resonances are not swept\n";
      return kExitDegenerate;
    }
    std::optional<ResonanceData> resonance;
    RadialPotential V = res.potential;
    if (cfg.resonant)
      resonance = res;
    else
      V = res.potential.with_coupling(cfg.detune * res.theta_star);
    report = cfg.mode == "free" ? sweep_free(V, cfg.lambda, cfg.eps, z, s, resonance)
                                : sweep_local(region, V, cfg.lambda, cfg.eps, z, s, resonance);
  }
  report.metadata["config_hash"] = cfg.hash;

  std::ostringstream csv;
  write_report_csv(csv, report, cfg.hash);
  write_file(out / "converge.csv", csv.str());
  json j = to_json(report);
  j["config_hash"] = cfg.hash;
  write_file(out / "converge.json", dump(j));
  std::ostringstream gp;
  write_report_gnuplot(gp, report, "converge.csv", cfg.hash);
  write_file(out / "converge.gp", gp.str());

  if (report.fit_l0)
    log << report.experiment << " sweep towards " << report.target
        << ": slope " << format_double(report.fit_l0->slope) << ", R^2 "
        << format_double(report.fit_l0->r2) << "\n";
  if (!report.all_valid()) {
    log << "some rows are invalid (z on or near the spectrum)\n";
    return kExitInvalidRows;
  }
  return kExitOk;
}

// Radial function on supp(v) orthogonal to v: 1 - c r^2 with c fixed by
// <v, 1 - c r^2> = 0, normalized.
Eigen::VectorXd orthogonal_probe(const RadialPotential& V, const RadialGrid& grid) {
  const Eigen::VectorXd v = split_uv(V, grid).second;
  const Eigen::VectorXd r2 = grid.nodes().array().square();
  Eigen::VectorXd one = Eigen::VectorXd::Zero(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (v(i) != 0.0) one(i) = 1.0;
  const Eigen::VectorXd rr = (one.array() * r2.array()).matrix();
  Eigen::VectorXd phi = one - (grid.inner(v, one) / grid.inner(v, rr)) * rr;
  return phi / std::sqrt(grid.inner(phi, phi));
}

int cmd_resonance(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  const RadialGrid grid = potential_grid(cfg, *cfg.potential);
  const ResonanceData res = tune_resonance(*cfg.potential, grid);
  const double a = res.potential.support();
  std::vector<double> radii = cfg.radii;
  if (radii.empty())
    for (int k = 0; k <= 40; ++k) radii.push_back(0.05 * a * std::pow(200.0, k / 40.0));

  const Eigen::VectorXd phi =
      cfg.synthetic_orthogonal ? orthogonal_probe(res.potential, grid) : res.pair.vector;
  const ResonanceProfile prof = resonance_profile(res.potential, grid, phi, radii);

  double tail_spread = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (radii[k] > a)
      tail_spread = std::max(tail_spread,
                             std::abs(4.0 * std::numbers::pi * radii[k] * prof.psi[k] -
                                      prof.tail_constant));

  json j{{"theta_star", res.theta_star},
         {"synthetic_orthogonal", cfg.synthetic_orthogonal},
         {"r", prof.r},
         {"psi", prof.psi},
         {"tail_constant", prof.tail_constant},
         {"overlap", prof.overlap},
         {"defect", prof.defect},
         {"tail_spread", tail_spread},
         {"config_hash", cfg.hash}};

  if (!cfg.synthetic_orthogonal) {
    std::vector<double> points;
    for (int k = 1; k <= 9; ++k) points.push_back(0.1 * k * a);
    for (int k = 1; k <= 10; ++k) points.push_back(a * (1.0 + 0.2 * k));
    const DistributionalResidual dr =
        distributional_residual(res, points, cfg.residual_step * a);
    j["distributional_residual"] = {{"max", dr.max_residual},
                                    {"max_potential_term", dr.max_potential_term},
                                    {"relative", dr.relative()}};
  }
  const NewtonTransform psi(grid, (split_uv(res.potential, grid).second.array() *
                                   phi.array()).matrix());
  json masses = json::array();
  for (double L : {10.0 * a, 20.0 * a, 40.0 * a, 80.0 * a})
    masses.push_back({{"cutoff", L}, {"mass", psi.mass(L)}});
  j["mass_under_doubling"] = masses;
  write_file(out / "profile.json", dump(j));
  log << "tail constant " << format_double(prof.tail_constant) << ", <v,phi> "
      << format_double(prof.overlap) << "\n";
  return kExitOk;
}

}  // namespace

json load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& command, const json& j) {
  Keys allowed = kCommon;
  const Keys* extra = command == "bs"          ? &kBs
                      : command == "pi"        ? &kPi
                      : command == "converge"  ? &kConverge
                      : command == "resonance" ? &kResonance
                                               : nullptr;
  if (!extra) throw ConfigError("unknown command '" + command + "'");
  allowed.insert(extra->begin(), extra->end());
  only(j, allowed, "config");

  ExperimentConfig cfg;
  cfg.command = command;
  cfg.hash = config_hash(j);
  try {
    if (j.contains("domain")) cfg.region = parse_region(j.at("domain"));
    if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"));
    if (j.contains("thresholds")) {
      const json& t = j.at("thresholds");
      only(t, {"slope", "eigenvalue_guard"}, "thresholds");
      cfg.slope_threshold = read_or<double>(t, "slope", cfg.slope_threshold, "thresholds");
      cfg.eigenvalue_guard =
          read_or<double>(t, "eigenvalue_guard", cfg.eigenvalue_guard, "thresholds");
    }
    cfg.seed = read_or<long long>(j, "seed", 0, "config");
    if (j.contains("potential")) cfg.potential = parse_profile(j.at("potential"), "potential");
    if (j.contains("density")) cfg.density = parse_profile(j.at("density"), "density");
    if (j.contains("z")) cfg.z = read<double>(j, "z", "config");
    if (j.contains("alpha")) cfg.alpha = read_alpha(j);
    cfg.lambda = read_or<double>(j, "lambda", cfg.lambda, "config");
    cfg.lambdas = read_or<std::vector<double>>(j, "lambdas", cfg.lambdas, "config");
    cfg.eps = read_or<std::vector<double>>(j, "eps", cfg.eps, "config");
    cfg.resonant = read_or<bool>(j, "resonant", cfg.resonant, "config");
    cfg.detune = read_or<double>(j, "detune", 0.5, "config");
    cfg.e_max = read_or<double>(j, "e_max", cfg.e_max, "config");
    cfg.radii = read_or<std::vector<double>>(j, "radii", cfg.radii, "config");
    cfg.synthetic_orthogonal =
        read_or<bool>(j, "synthetic_orthogonal", cfg.synthetic_orthogonal, "config");
    cfg.residual_step = read_or<double>(j, "residual_step", cfg.residual_step, "config");
    cfg.kernel_export = read_or<std::string>(j, "kernel_export", cfg.kernel_export, "config");
    if (j.contains("annulus")) {
      const auto a = read<std::vector<double>>(j, "annulus", "config");
      if (a.size() != 2) throw ConfigError("annulus: expected [r1, r2]");
      cfg.annulus = Annulus{a[0], a[1]};
    }
    if (j.contains("scaling")) {
      const json& s = j.at("scaling");
      only(s, {"kind", "exponent"}, "scaling");
      const std::string kind = read<std::string>(s, "kind", "scaling");
      if (kind != "correct" && kind != "wrong")
        throw ConfigError("scaling: kind must be correct or wrong");
      cfg.scaling.correct = kind == "correct";
      cfg.scaling.exponent = read_or<double>(s, "exponent", 2.0, "scaling");
    }
    if (j.contains("mode")) cfg.mode = read<std::string>(j, "mode", "config");
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  auto require = [&](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(command + ": " + what);
  };
  if (command == "bs" || command == "resonance") require(bool(cfg.potential), "potential is required");
  if (command == "pi") {
    require(j.contains("z") && j.contains("alpha"), "z and alpha are required");
    require(cfg.kernel_export == "none" || cfg.kernel_export == "binary" ||
                cfg.kernel_export == "json",
            "kernel_export must be none, binary or json");
  }
  if (command == "converge") {
    require(cfg.mode == "local" || cfg.mode == "free" || cfg.mode == "nonlocal",
            "mode must be local, free or nonlocal");
    require(j.contains("z"), "z is required");
    if (cfg.mode == "nonlocal") {
      require(bool(cfg.density) && j.contains("alpha"), "nonlocal needs density and alpha");
      require(!std::isinf(cfg.alpha), "nonlocal needs a finite alpha");
    } else {
      require(bool(cfg.potential), "potential is required");
    }
    if (cfg.mode == "free") require(bool(cfg.annulus), "free mode needs an annulus");
  }
  return cfg;
}

int run_command(const std::string& command, const json& config, const fs::path& out_dir,
                std::ostream& log) {
  try {
    const ExperimentConfig cfg = parse_config(command, config);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "'");
    if (command == "bs") return cmd_bs(cfg, out_dir, log);
    if (command == "pi") return cmd_pi(cfg, out_dir, log);
    if (command == "converge") return cmd_converge(cfg, out_dir, log);
    return cmd_resonance(cfg, out_dir, log);
  } catch (const NoResonanceError& e) {
    log << "error: " << e.what() << "\n";
    return kExitNoResonance;
  } catch (const OrthogonalResonanceError& e) {
    log << "error: " << e.what() << "\n";
    return kExitNoResonance;
  } catch (const SpectralPointError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalidRows;
  } catch (const PoleError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalidRows;
  } catch (const SingularCorrectionError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalidRows;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace deltalab
