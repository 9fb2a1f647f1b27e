#include "cli.hpp"

#include <cstdio>
#include <exception>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#include "slepian/errors.hpp"
#include "slepian/io.hpp"

namespace slepian::cli {

SpectralBand RunConfig::band() const {
  SpectralBand b = domain == "fb" ? SpectralBand{FourierBesselBand{K, L, M}} : SpectralBand{FourierLaguerreBand{P, L}};
  validate(b);
  return b;
}

Region RunConfig::parsed_region() const { return io::parse_region(region, mask_grid_L); }

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["domain"] = c.domain;
  j["P"] = c.P;
  j["L"] = c.L;
  j["K"] = c.K;
  j["M"] = c.M;
  j["region"] = c.region;
  j["mask_grid_L"] = c.mask_grid_L;
  j["out"] = c.out.string();
  j["dense"] = c.dense;
  j["m"] = c.order ? nlohmann::json(*c.order) : nlohmann::json(nullptr);
  j["count"] = c.count;
  j["grid"] = c.grid;
  j["grid_rmax"] = c.grid_rmax;
  j["sweep"] = c.sweep;
  j["input"] = c.input.string();
  j["input_kind"] = c.input_kind;
  j["J"] = c.J ? nlohmann::json(*c.J) : nlohmann::json(nullptr);
  j["grid_margin"] = c.grid_margin;
  j["points"] = c.points.string();
  return j;
}

namespace {

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--domain", c.domain, "Spectral domain")->check(CLI::IsMember({"fl", "fb"}))->capture_default_str();
  app.add_option("--P", c.P, "Fourier-Laguerre radial band limit")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--L", c.L, "Angular band limit")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--K", c.K, "Fourier-Bessel radial band limit")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--M", c.M, "Fourier-Bessel samples on (0, K]")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--region", c.region, "product:R1,R2,theta1,theta2 | mask:<path>,R1,R2 | fullball")
      ->capture_default_str();
  app.add_option("--mask-grid-L", c.mask_grid_L, "Grid band limit of weighted mask files")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--out", c.out, "Output directory")->capture_default_str();

  auto* kernel = app.add_option_group("kernel");
  kernel->add_flag("--dense", c.dense, "Also write the full Fourier-Laguerre kernel");

  auto* eigen = app.add_option_group("eigen");
  eigen->add_option("--m", c.order, "Keep only eigenfunctions of azimuthal order m");
  eigen->add_option("--count", c.count, "Eigenfunctions to write (0: ceil of the Shannon number)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  eigen->add_option("--grid", c.grid, "nr,ntheta: write f(r, theta) on the phi = 0 half-plane");
  eigen->add_option("--grid-rmax", c.grid_rmax, "Radial extent of --grid (0: 1.2 R2)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* shannon = app.add_option_group("shannon");
  shannon->add_option("--sweep", c.sweep, "NAME=start:stop:step over P, L, K or M");

  auto* io_group = app.add_option_group("project/synth");
  io_group->add_option("--input", c.input, "Input matrix file");
  io_group->add_option("--input-kind", c.input_kind, "coeffs or samples (values on the synth grid)")
      ->check(CLI::IsMember({"coeffs", "samples"}))
      ->capture_default_str();
  io_group->add_option("--J", c.J, "Truncation (default: floor of the Shannon number)")->check(CLI::NonNegativeNumber);
  io_group->add_option("--grid-margin", c.grid_margin, "Extra nodes of the Fourier-Laguerre sampling grid")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  io_group->add_option("--points", c.points, "CSV of r,theta,phi rows to evaluate at");
}

}  // namespace

int run(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Spatial-spectral concentration on the ball"};
  app.name("slepian");
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.get_config_formatter_base()->arrayDelimiter('\x1f');
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1, 1);
  add_options(app, c);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"kernel", "Write E and G factors or Fourier-Bessel blocks"},
      {"eigen", "Solve the concentration problem"},
      {"shannon", "Shannon numbers, optionally swept over a band parameter"},
      {"project", "Slepian coefficients, decay curves and Q(J) of a signal"},
      {"synth", "Evaluate coefficients on a grid or at points"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.command == "kernel") cmd_kernel(c);
    if (c.command == "eigen") cmd_eigen(c);
    if (c.command == "shannon") cmd_shannon(c);
    if (c.command == "project") cmd_project(c);
    if (c.command == "synth") cmd_synth(c);
  } catch (const ValidationError& e) {
    std::cerr << "slepian " << c.command << ": invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "slepian " << c.command << ": numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "slepian " << c.command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"slepian"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace slepian::cli
