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

#ifndef CFMIMO_HARNESS_HPP
#define CFMIMO_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cfmimo/simulation.hpp"

namespace cfmimo {

/// Full experiment description; serialized one-to-one as the JSON config file.
struct ExperimentConfig {
  NetworkConfig network;
  OfdmConfig ofdm;
  int m0 = 20;  // serving-set size
  std::vector<Scheme> schemes = {Scheme::kSync, Scheme::kAsync, Scheme::kMixed};
  std::vector<PrecoderType> precoders = {PrecoderType::kMr, PrecoderType::kLmmse};
  std::vector<ClustererType> clusterers = {ClustererType::kDistance, ClustererType::kFixed};
  int num_drops = 50;
  int realizations_per_drop = 300;
  std::uint64_t base_seed = 1;
  std::string output_path = "out";
  double ap_power = 0.2;  // watts
  double ul_power = 0.1;  // watts
  UplinkTimingMode ul_timing_mode = UplinkTimingMode::kNearestServedUser;
  PsiForm psi_form = PsiForm::kMatrixWeighted;
  int lmmse_normalizer_realizations = 1000;
  bool average_over_block = false;

  std::vector<std::string> validate() const;  // errors; empty means usable
  std::vector<std::string> warnings() const;
  SimulationOptions simulation_options() const;
};

/// Parses a JSON config file. Throws std::invalid_argument with a
/// line-addressed message on parse errors and a field-addressed message on
/// schema violations (unknown keys, bad enum values, wrong types).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin);
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Empirical CDF of a sample: values sorted ascending with quantile levels
/// (i+1)/n, plus median and 5th percentile (nearest-rank).
struct CdfTable {
  std::vector<double> values;
  std::vector<double> quantiles;
  double median = 0.0;
  double p5 = 0.0;
};
CdfTable aggregate_cdf(std::vector<double> sums);

/// Per-(scheme, precoder, clusterer) outcome of a multi-drop campaign.
struct ComboSummary {
  Scheme scheme;
  PrecoderType precoder;
  ClustererType clusterer;
  std::vector<double> per_drop_sum_se;  // indexed by drop
  CdfTable cdf;
  double mean_sum_se = 0.0;
};

struct ExperimentSummary {
  std::vector<ComboSummary> combos;
  std::vector<std::uint64_t> drop_seeds;
  std::string results_csv;
  std::string cdf_csv;
  std::string summary_csv;
  std::string manifest_json;
  Diagnostics total_diagnostics;
};

/// Runs the campaign: num_drops independent drops (parallelized over up to
/// `workers` threads; 0 means hardware concurrency), writes results.csv,
/// cdf.csv, summary.csv and manifest.json under cfg.output_path. Outputs are
/// byte-identical for a given (config, base_seed) regardless of worker count.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, int workers = 0);

/// Parameter names accepted by sweep().
bool apply_sweep_parameter(ExperimentConfig* cfg, const std::string& name, double value);

struct SweepSummary {
  std::string summary_csv;
  std::vector<double> values;  // sorted ascending
};

/// One run_experiment per value (sorted ascending), each writing into its own
/// subdirectory, plus a consolidated table keyed by parameter value.
SweepSummary sweep(const ExperimentConfig& base, const std::string& parameter,
                   std::vector<double> values, int workers = 0);

}  // namespace cfmimo

#endif  // CFMIMO_HARNESS_HPP
