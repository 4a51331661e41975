// mirrorsim: command-line front end for the virtual experiments.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mirrorsim/config_io.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/experiments.hpp"
#include "mirrorsim/kernels.hpp"
#include "mirrorsim/report.hpp"

namespace fs = std::filesystem;
using namespace mirrorsim;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kNumerical = 2, kExperiment = 3 };

struct Options {
  std::string config;
  std::string out;
  bool plot = false;
  std::vector<std::string> overrides;
  int jobs = 1;
};

ExperimentReport run(const std::string& command, const RunConfig& cfg, int jobs) {
  if (command == "sweep") return exp_triangular_sweep(cfg.device, cfg.sweep);
  if (command == "drift") return exp_dc_drift(cfg.device, cfg.drift);
  if (command == "hold") return exp_bipolar_hold(cfg.device, cfg.hold, jobs);
  if (command == "endurance") return exp_endurance(cfg.device, cfg.endurance);
  return exp_simulate(cfg.device, drive_schedule(cfg.drive), cfg.simulate.duration, cfg.simulate.sample_dt);
}

int execute(const std::string& command, const Options& opt) {
  try {
    kernels::set_thread_count(opt.jobs);
    std::optional<fs::path> path;
    if (!opt.config.empty()) path = opt.config;
    const RunConfig cfg = resolve_defaults(load_run_config(path, opt.overrides));

    ExperimentReport report = run(command, cfg, opt.jobs);
    report.config = to_json(cfg);
    for (const auto& w : report.warnings) fmt::print(stderr, "warning: {}\n", w);

    const auto files = write_report(report, opt.out, opt.plot);
    fmt::print("resolved config: {}\n", (fs::path(opt.out) / "resolved_config.json").string());
    fmt::print("outputs:\n");
    for (const auto& f : files) fmt::print("  {}\n", f.string());
    return kOk;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const ExperimentError& e) {
    fmt::print(stderr, "experiment failed: {}\n", e.what());
    return kExperiment;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumerical;
  } catch (const IntegrationError& e) {
    fmt::print(stderr, "integration error: {}\n", e.what());
    return kNumerical;
  } catch (const DomainError& e) {
    fmt::print(stderr, "domain error: {}\n", e.what());
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electrostatic torsional micro-mirror simulator"};
  app.require_subcommand(1, 1);

  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"sweep", "triangular sweep: dynamic V_pi / V_m extraction"},
      {"drift", "compressed DC cycling: V_pi / V_m drift from trapped charge"},
      {"hold", "bipolar high-frequency hold with grounded release snapshots"},
      {"endurance", "toggle endurance run with charging disabled"},
      {"simulate", "single trajectory under the configured drive"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON configuration (defaults to the canonical mirror)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->required();
    sub->add_flag("--plot", opt.plot, "also write SVG plots");
    sub->add_option("--override", opt.overrides, "dot-path override, e.g. charge.k_inj=0");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  return execute(app.get_subcommands().front()->get_name(), opt);
}
