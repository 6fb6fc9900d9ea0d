#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "heatlab/error.hpp"
#include "heatlab/experiments.hpp"
#include "heatlab/io.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::string output_root() {
  const char* env = std::getenv("HEATLAB_OUTPUT_ROOT");
  return env != nullptr ? std::string(env) : std::string();
}

heatlab::ExperimentConfig load(const std::string& path) {
  nlohmann::json j;
  try {
    j = heatlab::read_json(path);
  } catch (const std::exception& e) {
    throw heatlab::ConfigError(std::string("config: ") + e.what());
  }
  return heatlab::parse_config(j);
}

int cmd_validate(const std::string& path) {
  try {
    const auto cfg = load(path);
    for (const auto& w : cfg.warnings) std::cout << "WARNING " << w << '\n';
    std::cout << "OK " << cfg.experiment << '\n';
    return 0;
  } catch (const heatlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_run(const std::string& path) {
  heatlab::ExperimentConfig cfg;
  try {
    cfg = load(path);
  } catch (const heatlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& w : cfg.warnings) std::cerr << "WARNING " << w << '\n';
  const std::string dir = heatlab::resolve_output_dir(cfg, output_root());
  try {
    const auto outcome = heatlab::run_experiment(cfg, dir);
    for (const auto& c : outcome.checks) std::cout << heatlab::summary_line(c) << '\n';
    for (const auto& f : outcome.numerical_flags) std::cout << "FLAG " << f << '\n';
    return outcome.failed() || !outcome.numerical_flags.empty() ? kExitFail : 0;
  } catch (const heatlab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitFail;
  } catch (const heatlab::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_report(const std::string& dir) {
  try {
    std::cout << heatlab::report_directory(dir);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heatlab: spectral inequalities and heat control experiments"};
  app.require_subcommand(1);
  std::string cfg_path;
  std::string report_dir;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", cfg_path, "experiment config (JSON)")->required();
  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("config", cfg_path, "experiment config (JSON)")->required();
  auto* report = app.add_subcommand("report", "summarize an output directory");
  report->add_option("dir", report_dir, "output directory")->required();
  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(cfg_path);
  if (run->parsed()) return cmd_run(cfg_path);
  return cmd_report(report_dir);
}
