#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "deltalab/config.hpp"

using namespace deltalab;
namespace fs = std::filesystem;

namespace {
constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("deltalab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int run(const std::string& command, const json& config, const fs::path& out) {
  std::ostringstream log;
  return run_command(command, config, out, log);
}

const json kWell{{"profile", "square_well"}, {"support", 1.0}};
const json kBall{{"type", "ball"}, {"radius", 5.0}, {"bc", {{"kind", "dirichlet"}}}};
const json kSmallGrid{{"support_panels", 4}, {"outer_panels", 12}, {"nodes_per_panel", 8}};
}  // namespace

TEST_CASE("bs: tuned square well") {
  const fs::path out = scratch("bs");
  const json cfg{{"domain", {{"type", "free"}}},
                 {"potential", kWell},
                 {"grid", {{"support_panels", 20}, {"outer_panels", 20}}},
                 {"lambdas", {0.0, 1.0}}};
  REQUIRE(run("bs", cfg, out) == kExitOk);
  const json j = read_json(out / "resonance.json");
  CHECK(std::abs(j.at("theta_star").get<double>() - kPi * kPi / 4.0) < 1e-3);
  CHECK(j.at("simple").get<bool>());
  CHECK(j.at("alphas").at(0).at("alpha").get<double>() == 0.0);
  CHECK(j.at("alphas").at(1).at("alpha").get<double>() < 0.0);
  CHECK(j.at("config_hash").get<std::string>() == config_hash(cfg));
}

TEST_CASE("bad configs exit with 1") {
  const fs::path out = scratch("bad");
  CHECK(run("bs", json{{"potential", kWell}, {"potentail", 1}}, out) == kExitInput);
  CHECK(run("bs", json{{"domain", {{"type", "ball"}}}, {"potential", kWell}}, out) ==
        kExitInput);
  CHECK(run("bs", json{{"potential", {{"profile", "square_well"}, {"support", "one"}}}},
            out) == kExitInput);
  CHECK(run("pi", json{{"z", 1.0}}, out) == kExitInput);
  CHECK(run("converge", json{{"mode", "sideways"}, {"z", 1.0}}, out) == kExitInput);

  const fs::path bad = out / "broken.json";
  std::ofstream(bad) << "{\"potential\": ";
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  CHECK_THROWS_AS(load_config(out / "missing.json"), ConfigError);
}

TEST_CASE("pi: closed-form bound states") {
  const fs::path out = scratch("pi");
  const json free_cfg{{"domain", {{"type", "free"}}}, {"z", 2.0}, {"alpha", -1.0 / (4.0 * kPi)}};
  REQUIRE(run("pi", free_cfg, out) == kExitOk);
  CHECK(std::abs(read_json(out / "pi.json").at("eigenvalue").get<double>() + 1.0) < 1e-10);

  const json none{{"domain", kBall}, {"z", 1.0}, {"alpha", "infinity"}};
  REQUIRE(run("pi", none, out) == kExitOk);
  CHECK(read_json(out / "pi.json").at("eigenvalue") == "none");

  // z sits on -E
  CHECK(run("pi", json{{"domain", {{"type", "free"}}}, {"z", 1.0}, {"alpha", -1.0 / (4.0 * kPi)}},
            out) == kExitInvalidRows);
}

TEST_CASE("pi: kernel export round trip") {
  const fs::path out = scratch("pik");
  const json cfg{{"domain", kBall}, {"z", 1.0}, {"alpha", 0.0}, {"kernel_export", "binary"}};
  REQUIRE(run("pi", cfg, out) == kExitOk);
  std::ifstream is(out / "pi_kernel.bin", std::ios::binary);
  const KernelFile k = read_kernel_binary(is);
  CHECK(k.hash == config_hash(cfg));
  CHECK(k.sector == 0);
  REQUIRE(k.nodal.rows() == k.nodes.size());
  // nodal rows carry the quadrature weight of the column; the Green
  // function itself is symmetric
  const Eigen::MatrixXd G = k.nodal * k.weights.cwiseInverse().asDiagonal();
  CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-12 * G.cwiseAbs().maxCoeff());
}

TEST_CASE("converge: local, nonlocal and invalid z") {
  const fs::path out = scratch("conv");
  json local{{"domain", kBall}, {"grid", kSmallGrid}, {"mode", "local"}, {"z", 1.0},
             {"potential", kWell}, {"resonant", false}, {"annulus", {1.0, 2.0}}};
  REQUIRE(run("converge", local, out) == kExitOk);
  const json j = read_json(out / "converge.json");
  CHECK(j.at("target") == "free");
  CHECK(j.at("config_hash").get<std::string>() == config_hash(local));
  CHECK(fs::exists(out / "converge.gp"));
  const std::string csv = slurp(out / "converge.csv");
  CHECK(csv.find("# config_hash: " + config_hash(local)) == 0);

  const json nonlocal{{"domain", kBall},
                      {"grid", kSmallGrid},
                      {"mode", "nonlocal"},
                      {"z", 4.0},
                      {"density", kWell},
                      {"alpha", -1.0 / (4.0 * kPi)},
                      {"scaling", {{"kind", "wrong"}}}};
  REQUIRE(run("converge", nonlocal, out) == kExitOk);
  CHECK(read_json(out / "converge.json").at("target") == "free");

  json invalid = nonlocal;
  invalid["domain"] = {{"type", "free"}};
  invalid["z"] = 1.0;
  invalid["scaling"] = {{"kind", "correct"}};
  CHECK(run("converge", invalid, out) == kExitInvalidRows);
}

TEST_CASE("resonance: tail law and orthogonal probe") {
  const fs::path out = scratch("res");
  json cfg{{"domain", {{"type", "free"}}}, {"potential", kWell}};
  REQUIRE(run("resonance", cfg, out) == kExitOk);
  json j = read_json(out / "profile.json");
  CHECK(j.at("tail_spread").get<double>() < 1e-6 * std::abs(j.at("tail_constant").get<double>()));
  CHECK(std::abs(j.at("tail_constant").get<double>()) > 0.1);

  cfg["synthetic_orthogonal"] = true;
  REQUIRE(run("resonance", cfg, out) == kExitOk);
  j = read_json(out / "profile.json");
  CHECK(std::abs(j.at("tail_constant").get<double>()) < 1e-10);

  json repulsive = cfg;
  repulsive["potential"]["sign"] = 1;
  CHECK(run("resonance", repulsive, out) == kExitNoResonance);
}

TEST_CASE("binary: identical configs give byte-identical CSV") {
  const fs::path dir = scratch("exe");
  const json cfg{{"domain", kBall}, {"grid", kSmallGrid}, {"mode", "local"},
                 {"z", 1.0},        {"potential", kWell}, {"annulus", {1.0, 2.0}}};
  std::ofstream(dir / "cfg.json") << cfg.dump();
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = std::string("\"") + DELTALAB_CLI + "\" converge --config \"" +
                            (dir / "cfg.json").string() + "\" --out \"" +
                            (dir / sub).string() + "\" 2>/dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
  }
  const std::string a = slurp(dir / "a" / "converge.csv");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(dir / "b" / "converge.csv"));

  std::ofstream(dir / "broken.json") << "{";
  const std::string bad = std::string("\"") + DELTALAB_CLI + "\" bs --config \"" +
                          (dir / "broken.json").string() + "\" --out \"" +
                          (dir / "a").string() + "\" 2>/dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == kExitInput);
}
