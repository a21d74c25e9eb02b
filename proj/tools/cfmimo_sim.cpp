// cfmimo: link-level simulator for cell-free massive MIMO-OFDM downlink
// Copyright (C) 2026 cfmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Experiment driver. Subcommands:
//   run      --config cfg.json [--seed S] [--drops N] [--out DIR] [--workers W]
//   sweep    --config cfg.json --param M --values 2,4,6,8,10 [--workers W]
//   validate --config cfg.json

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cfmimo/harness.hpp"
#include "cfmimo/version.hpp"

namespace {

void print_warnings(const cfmimo::ExperimentConfig& cfg) {
  for (const auto& w : cfg.warnings()) {
    std::cerr << "warning: " << w << "\n";
  }
}

void print_summary(const cfmimo::ExperimentSummary& summary) {
  std::printf("%-6s %-6s %-9s %12s %12s\n", "scheme", "prec", "clusterer", "median_sumSE",
              "p5_sumSE");
  for (const auto& combo : summary.combos) {
    std::printf("%-6s %-6s %-9s %12.4f %12.4f\n", cfmimo::to_string(combo.scheme),
                cfmimo::to_string(combo.precoder), cfmimo::to_string(combo.clusterer),
                combo.cdf.median, combo.cdf.p5);
  }
  std::printf("results: %s\n", summary.results_csv.c_str());
  std::printf("cdf:     %s\n", summary.cdf_csv.c_str());
  std::printf("summary: %s\n", summary.summary_csv.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfmimo_sim: cell-free massive MIMO-OFDM downlink experiments"};
  app.set_version_flag("--version", cfmimo::kVersionString);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int drops = 0;
  int workers = 0;
  std::string param;
  std::vector<double> values;

  CLI::App* run_cmd = app.add_subcommand("run", "Run a Monte-Carlo campaign");
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override base_seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run_cmd->add_option("--drops", drops, "Override num_drops");
  run_cmd->add_option("--out", out_dir, "Override output_path");
  run_cmd->add_option("--workers", workers, "Worker threads (0 = hardware)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter");
  sweep_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep_cmd->add_option("--param", param, "Parameter: M, M0, Q, K, num_subcarriers")
      ->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out", out_dir, "Override output_path");
  sweep_cmd->add_option("--workers", workers, "Worker threads (0 = hardware)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Schema-check a config file");
  validate_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) {
      const cfmimo::ExperimentConfig cfg = cfmimo::load_config(config_path);
      print_warnings(cfg);
      std::printf("%s: OK\n", config_path.c_str());
      return 0;
    }

    cfmimo::ExperimentConfig cfg = cfmimo::load_config(config_path);
    if (seed_set) cfg.base_seed = seed;
    if (drops > 0) cfg.num_drops = drops;
    if (!out_dir.empty()) cfg.output_path = out_dir;
    print_warnings(cfg);

    if (run_cmd->parsed()) {
      const cfmimo::ExperimentSummary summary = cfmimo::run_experiment(cfg, workers);
      print_summary(summary);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const cfmimo::SweepSummary summary = cfmimo::sweep(cfg, param, values, workers);
      std::printf("sweep summary: %s\n", summary.summary_csv.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
