#include <filesystem>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "clockdil/harness/config.hpp"
#include "clockdil/harness/experiments.hpp"
#include "clockdil/types.hpp"

namespace h = clockdil::harness;

int main(int argc, char** argv) {
  CLI::App app{"clock-mode dilation experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path, omega_text, method_text, out_dir;
  bool full = false;
  run->add_option("config", config_path, "experiment file (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("--omega", omega_text, "comma separated clock widths");
  run->add_option("--method", method_text, "auto, dense or krylov");
  run->add_option("--out-dir", out_dir, "directory for the CSV and JSON outputs");
  run->add_flag("--full", full, "paper-size Fokker-Planck run (slow)");

  auto* check = app.add_subcommand("check", "parse and validate a config without running it");
  std::string check_path;
  check->add_option("config", check_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      h::validate(h::load_config(check_path));
      fmt::print("{}: ok\n", check_path);
      return 0;
    }

    h::ExperimentConfig config = h::load_config(config_path);
    h::Overrides ov;
    if (!omega_text.empty()) ov.omegas = h::parse_number_list(omega_text, "--omega");
    if (!method_text.empty()) ov.method = h::parse_method(method_text, "--method");
    if (!out_dir.empty()) ov.out_dir = out_dir;
    ov.full = full;
    h::apply_overrides(config, ov);

    const h::ExperimentReport report = h::run_experiment(config);
    if (!config.output.csv.empty()) {
      if (config.output.csv.has_parent_path()) std::filesystem::create_directories(config.output.csv.parent_path());
      h::write_csv(config.output.csv, report.rows);
    } else {
      h::write_csv(std::cout, report.rows);
    }
    if (!config.output.json.empty()) {
      if (config.output.json.has_parent_path()) std::filesystem::create_directories(config.output.json.parent_path());
      h::write_json(config.output.json, report);
    }

    for (const auto& a : report.assertions)
      fmt::print(stderr, "[{}] {}: {}\n", a.passed ? "PASS" : "FAIL", a.name, a.detail);
    return report.passed() ? 0 : 1;
  } catch (const clockdil::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
