// deltalab <bs|pi|converge|resonance> --config <path> [--out <dir>]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deltalab/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Point interactions on a ball: Birman-Schwinger operators, resolvents, eps-sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  for (const char* name : {"bs", "pi", "converge", "resonance"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : deltalab::kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const deltalab::json config = deltalab::load_config(config_path);
    return deltalab::run_command(command, config, out_dir, std::cerr);
  } catch (const deltalab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return deltalab::kExitInput;
  }
}
