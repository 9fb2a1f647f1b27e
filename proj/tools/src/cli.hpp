#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "slepian/band.hpp"
#include "slepian/regions.hpp"

namespace slepian::cli {

/// Every setting of a run. Defaults reproduce the r in [15, 25],
/// theta in [pi/8, 3pi/8] configuration.
struct RunConfig {
  std::string command;
  std::string domain = "fl";
  int P = 30;
  int L = 20;
  double K = 1.4;
  int M = 70;
  std::string region = "product:15,25,0.39269908169872414,1.1780972450961724";
  int mask_grid_L = 0;
  std::filesystem::path out = "out";

  // kernel
  bool dense = false;
  // eigen
  std::optional<int> order;
  int count = 0;
  std::string grid;
  double grid_rmax = 0.0;
  // shannon
  std::string sweep;
  // project / synth
  std::filesystem::path input;
  std::string input_kind = "coeffs";
  std::optional<int> J;
  int grid_margin = 8;
  std::filesystem::path points;

  SpectralBand band() const;
  Region parsed_region() const;
};

nlohmann::json to_json(const RunConfig& c);

/// Parses arguments (argv[0] is the program name), runs the subcommand and
/// returns the process exit code: 0 ok, 2 invalid input, 1 numerical failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// Subcommands; throw slepian::ValidationError / NumericalError.
void cmd_kernel(const RunConfig& c);
void cmd_eigen(const RunConfig& c);
void cmd_shannon(const RunConfig& c);
void cmd_project(const RunConfig& c);
void cmd_synth(const RunConfig& c);

}  // namespace slepian::cli
