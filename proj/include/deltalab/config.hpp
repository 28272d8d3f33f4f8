#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deltalab/convlab.hpp"
#include "deltalab/domain.hpp"
#include "deltalab/errors.hpp"
#include "deltalab/potential.hpp"
#include "deltalab/serialize.hpp"

namespace deltalab {

/// Malformed, mistyped or unknown configuration entries.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitNoResonance = 2,
  kExitDegenerate = 3,
  kExitInvalidRows = 4,
};

/// Typed experiment parameters; see README for the JSON schema.
struct ExperimentConfig {
  std::string command;
  std::string mode;
  Region region = FreeSpace{};
  std::optional<RadialPotential> potential;
  std::optional<RadialPotential> density;
  GridSpec grid;
  double z = 1.0;
  double lambda = 0.0;
  std::vector<double> lambdas{0.0};
  double alpha = 0.0;
  std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  std::optional<Annulus> annulus;
  bool resonant = true;
  double detune = 0.5;
  NonlocalScaling scaling;
  double slope_threshold = 0.8;
  double eigenvalue_guard = 1e-6;
  double e_max = 1e4;
  std::vector<double> radii;
  bool synthetic_orthogonal = false;
  double residual_step = 1e-3;
  std::string kernel_export = "none";
  long long seed = 0;
  std::string hash;
};

/// Reads a JSON document; throws ConfigError on I/O or syntax errors.
json load_config(const std::filesystem::path& path);

/// Validates `config` for `command` (bs, pi, converge, resonance).
/// Unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(const std::string& command, const json& config);

/// Runs a command and writes its artifacts into `out_dir`. Returns the
/// exit code; library errors are mapped onto codes and reported on `log`.
int run_command(const std::string& command, const json& config,
                const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace deltalab
