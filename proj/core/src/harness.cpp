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

#include "cfmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "cfmimo/version.hpp"

namespace cfmimo {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDropSeedTag = 0xD40Full;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

struct FieldErrors {
  std::vector<std::string> errors;
  void add(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }
  void raise_if_any(const std::string& origin) const {
    if (errors.empty()) return;
    std::string joined = origin + ": invalid config";
    for (const auto& e : errors) joined += "\n  " + e;
    throw std::invalid_argument(joined);
  }
};

void check_keys(const ordered_json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, FieldErrors* errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) errs->add(path + "." + it.key(), "unknown field");
  }
}

template <typename T>
void read_field(const ordered_json& obj, const std::string& path, const char* key, T* out,
                FieldErrors* errs) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    *out = it->get<T>();
  } catch (const std::exception&) {
    errs->add(path + "." + key, "wrong type");
  }
}

template <typename Enum>
void read_enum(const ordered_json& obj, const std::string& path, const char* key,
               bool (*parse)(const std::string&, Enum*), const char* expected, Enum* out,
               FieldErrors* errs) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_string() || !parse(it->get<std::string>(), out)) {
    errs->add(path + "." + key, std::string("expected one of ") + expected);
  }
}

bool parse_pathloss_model(const std::string& s, PathlossModel* out) {
  if (s == "logDistance") *out = PathlossModel::kLogDistance;
  else if (s == "threeSlopeLike") *out = PathlossModel::kThreeSlopeLike;
  else return false;
  return true;
}

bool parse_correlation_model(const std::string& s, CorrelationModel* out) {
  if (s == "uncorrelated") *out = CorrelationModel::kUncorrelated;
  else if (s == "localScattering") *out = CorrelationModel::kLocalScattering;
  else return false;
  return true;
}

bool parse_ul_timing(const std::string& s, UplinkTimingMode* out) {
  if (s == "nearestServedUser") *out = UplinkTimingMode::kNearestServedUser;
  else if (s == "globalZero") *out = UplinkTimingMode::kGlobalZero;
  else return false;
  return true;
}

bool parse_psi_form(const std::string& s, PsiForm* out) {
  if (s == "matrixWeighted") *out = PsiForm::kMatrixWeighted;
  else if (s == "scalar") *out = PsiForm::kScalarTrace;
  else return false;
  return true;
}

const char* to_string(PathlossModel m) {
  return m == PathlossModel::kLogDistance ? "logDistance" : "threeSlopeLike";
}
const char* to_string(CorrelationModel m) {
  return m == CorrelationModel::kUncorrelated ? "uncorrelated" : "localScattering";
}
const char* to_string(UplinkTimingMode m) {
  return m == UplinkTimingMode::kNearestServedUser ? "nearestServedUser" : "globalZero";
}
const char* to_string(PsiForm f) {
  return f == PsiForm::kMatrixWeighted ? "matrixWeighted" : "scalar";
}

template <typename Enum>
void read_enum_list(const ordered_json& obj, const std::string& path, const char* key,
                    bool (*parse)(const std::string&, Enum*), const char* expected,
                    std::vector<Enum>* out, FieldErrors* errs) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array()) {
    errs->add(path + "." + key, "expected an array of strings");
    return;
  }
  std::vector<Enum> parsed;
  for (const auto& entry : *it) {
    Enum value;
    if (!entry.is_string() || !parse(entry.get<std::string>(), &value)) {
      errs->add(path + "." + key, std::string("expected entries from ") + expected);
      return;
    }
    for (const Enum& prev : parsed) {
      if (prev == value) {
        errs->add(path + "." + key, "duplicate entry '" + entry.get<std::string>() + "'");
        return;
      }
    }
    parsed.push_back(value);
  }
  *out = std::move(parsed);
}

void network_from_json(const ordered_json& obj, NetworkConfig* net, FieldErrors* errs) {
  check_keys(obj, "network",
             {"area_side", "num_aps", "num_users", "antennas_per_ap", "wrap_around",
              "pathloss_model", "correlation_model", "asd_deg", "noise_power", "min_distance",
              "pathloss"},
             errs);
  read_field(obj, "network", "area_side", &net->area_side, errs);
  read_field(obj, "network", "num_aps", &net->num_aps, errs);
  read_field(obj, "network", "num_users", &net->num_users, errs);
  read_field(obj, "network", "antennas_per_ap", &net->antennas_per_ap, errs);
  read_field(obj, "network", "wrap_around", &net->wrap_around, errs);
  read_enum(obj, "network", "pathloss_model", &parse_pathloss_model,
            "{logDistance, threeSlopeLike}", &net->pathloss_model, errs);
  read_enum(obj, "network", "correlation_model", &parse_correlation_model,
            "{uncorrelated, localScattering}", &net->correlation_model, errs);
  read_field(obj, "network", "asd_deg", &net->asd_deg, errs);
  read_field(obj, "network", "noise_power", &net->noise_power, errs);
  read_field(obj, "network", "min_distance", &net->min_distance, errs);
  if (auto it = obj.find("pathloss"); it != obj.end()) {
    const ordered_json& pl = *it;
    check_keys(pl, "network.pathloss",
               {"ref_gain_db", "slope_db_per_decade", "shadowing_sigma_db",
                "three_slope_loss_db", "three_slope_inner_m", "three_slope_outer_m"},
               errs);
    read_field(pl, "network.pathloss", "ref_gain_db", &net->pathloss.ref_gain_db, errs);
    read_field(pl, "network.pathloss", "slope_db_per_decade",
               &net->pathloss.slope_db_per_decade, errs);
    read_field(pl, "network.pathloss", "shadowing_sigma_db",
               &net->pathloss.shadowing_sigma_db, errs);
    read_field(pl, "network.pathloss", "three_slope_loss_db",
               &net->pathloss.three_slope_loss_db, errs);
    read_field(pl, "network.pathloss", "three_slope_inner_m",
               &net->pathloss.three_slope_inner_m, errs);
    read_field(pl, "network.pathloss", "three_slope_outer_m",
               &net->pathloss.three_slope_outer_m, errs);
  }
}

void ofdm_from_json(const ordered_json& obj, OfdmConfig* ofdm, FieldErrors* errs) {
  check_keys(obj, "ofdm",
             {"num_subcarriers", "cp_length", "subcarrier_spacing", "coherence_block"}, errs);
  read_field(obj, "ofdm", "num_subcarriers", &ofdm->num_subcarriers, errs);
  read_field(obj, "ofdm", "cp_length", &ofdm->cp_length, errs);
  read_field(obj, "ofdm", "subcarrier_spacing", &ofdm->subcarrier_spacing, errs);
  if (auto it = obj.find("coherence_block"); it != obj.end()) {
    const ordered_json& cb = *it;
    check_keys(cb, "ofdm.coherence_block",
               {"num_subcarriers", "num_symbols", "first_subcarrier"}, errs);
    read_field(cb, "ofdm.coherence_block", "num_subcarriers",
               &ofdm->coherence_block.num_subcarriers, errs);
    read_field(cb, "ofdm.coherence_block", "num_symbols", &ofdm->coherence_block.num_symbols,
               errs);
    read_field(cb, "ofdm.coherence_block", "first_subcarrier",
               &ofdm->coherence_block.first_subcarrier, errs);
  }
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const std::exception& e) {
    // nlohmann's message is already line-addressed.
    throw std::invalid_argument(origin + ": " + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument(origin + ": top level must be an object");

  ExperimentConfig cfg;
  FieldErrors errs;
  check_keys(root, "config",
             {"network", "ofdm", "m0", "schemes", "precoders", "clusterers", "num_drops",
              "realizations_per_drop", "base_seed", "output_path", "ap_power", "ul_power",
              "ul_timing_mode", "psi_form", "lmmse_normalizer_realizations",
              "average_over_block"},
             &errs);
  if (auto it = root.find("network"); it != root.end()) {
    network_from_json(*it, &cfg.network, &errs);
  }
  if (auto it = root.find("ofdm"); it != root.end()) {
    ofdm_from_json(*it, &cfg.ofdm, &errs);
  }
  read_field(root, "config", "m0", &cfg.m0, &errs);
  read_enum_list(root, "config", "schemes", &parse_scheme, "{sync, async, mixed}",
                 &cfg.schemes, &errs);
  read_enum_list(root, "config", "precoders", &parse_precoder, "{MR, LMMSE}", &cfg.precoders,
                 &errs);
  read_enum_list(root, "config", "clusterers", &parse_clusterer, "{distance, fixed}",
                 &cfg.clusterers, &errs);
  read_field(root, "config", "num_drops", &cfg.num_drops, &errs);
  read_field(root, "config", "realizations_per_drop", &cfg.realizations_per_drop, &errs);
  read_field(root, "config", "base_seed", &cfg.base_seed, &errs);
  read_field(root, "config", "output_path", &cfg.output_path, &errs);
  read_field(root, "config", "ap_power", &cfg.ap_power, &errs);
  read_field(root, "config", "ul_power", &cfg.ul_power, &errs);
  read_enum(root, "config", "ul_timing_mode", &parse_ul_timing,
            "{nearestServedUser, globalZero}", &cfg.ul_timing_mode, &errs);
  read_enum(root, "config", "psi_form", &parse_psi_form, "{matrixWeighted, scalar}",
            &cfg.psi_form, &errs);
  read_field(root, "config", "lmmse_normalizer_realizations",
             &cfg.lmmse_normalizer_realizations, &errs);
  read_field(root, "config", "average_over_block", &cfg.average_over_block, &errs);
  errs.raise_if_any(origin);

  const std::vector<std::string> violations = cfg.validate();
  if (!violations.empty()) {
    FieldErrors ferrs;
    ferrs.errors = violations;
    ferrs.raise_if_any(origin);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str(), path);
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  ordered_json root;
  ordered_json net;
  net["area_side"] = cfg.network.area_side;
  net["num_aps"] = cfg.network.num_aps;
  net["num_users"] = cfg.network.num_users;
  net["antennas_per_ap"] = cfg.network.antennas_per_ap;
  net["wrap_around"] = cfg.network.wrap_around;
  net["pathloss_model"] = to_string(cfg.network.pathloss_model);
  net["correlation_model"] = to_string(cfg.network.correlation_model);
  net["asd_deg"] = cfg.network.asd_deg;
  net["noise_power"] = cfg.network.noise_power;
  net["min_distance"] = cfg.network.min_distance;
  ordered_json pl;
  pl["ref_gain_db"] = cfg.network.pathloss.ref_gain_db;
  pl["slope_db_per_decade"] = cfg.network.pathloss.slope_db_per_decade;
  pl["shadowing_sigma_db"] = cfg.network.pathloss.shadowing_sigma_db;
  pl["three_slope_loss_db"] = cfg.network.pathloss.three_slope_loss_db;
  pl["three_slope_inner_m"] = cfg.network.pathloss.three_slope_inner_m;
  pl["three_slope_outer_m"] = cfg.network.pathloss.three_slope_outer_m;
  net["pathloss"] = pl;
  root["network"] = net;

  ordered_json ofdm;
  ofdm["num_subcarriers"] = cfg.ofdm.num_subcarriers;
  ofdm["cp_length"] = cfg.ofdm.cp_length;
  ofdm["subcarrier_spacing"] = cfg.ofdm.subcarrier_spacing;
  ordered_json cb;
  cb["num_subcarriers"] = cfg.ofdm.coherence_block.num_subcarriers;
  cb["num_symbols"] = cfg.ofdm.coherence_block.num_symbols;
  cb["first_subcarrier"] = cfg.ofdm.coherence_block.first_subcarrier;
  ofdm["coherence_block"] = cb;
  root["ofdm"] = ofdm;

  root["m0"] = cfg.m0;
  ordered_json schemes = ordered_json::array();
  for (Scheme s : cfg.schemes) schemes.push_back(to_string(s));
  root["schemes"] = schemes;
  ordered_json precoders = ordered_json::array();
  for (PrecoderType p : cfg.precoders) precoders.push_back(to_string(p));
  root["precoders"] = precoders;
  ordered_json clusterers = ordered_json::array();
  for (ClustererType c : cfg.clusterers) clusterers.push_back(to_string(c));
  root["clusterers"] = clusterers;
  root["num_drops"] = cfg.num_drops;
  root["realizations_per_drop"] = cfg.realizations_per_drop;
  root["base_seed"] = cfg.base_seed;
  root["output_path"] = cfg.output_path;
  root["ap_power"] = cfg.ap_power;
  root["ul_power"] = cfg.ul_power;
  root["ul_timing_mode"] = to_string(cfg.ul_timing_mode);
  root["psi_form"] = to_string(cfg.psi_form);
  root["lmmse_normalizer_realizations"] = cfg.lmmse_normalizer_realizations;
  root["average_over_block"] = cfg.average_over_block;
  return root.dump(2) + "\n";
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors = network.validate();
  for (const auto& e : ofdm.validate()) errors.push_back(e);
  if (m0 < 1 || m0 > network.num_aps) {
    errors.push_back("m0: must be in [1, network.num_aps]");
  }
  if (schemes.empty()) errors.push_back("schemes: must not be empty");
  if (precoders.empty()) errors.push_back("precoders: must not be empty");
  if (clusterers.empty()) errors.push_back("clusterers: must not be empty");
  if (num_drops < 1) errors.push_back("num_drops: must be >= 1");
  if (realizations_per_drop < 1) errors.push_back("realizations_per_drop: must be >= 1");
  if (!(ap_power > 0.0)) errors.push_back("ap_power: must be > 0");
  if (!(ul_power > 0.0)) errors.push_back("ul_power: must be > 0");
  if (lmmse_normalizer_realizations < 1) {
    errors.push_back("lmmse_normalizer_realizations: must be >= 1");
  }
  if (output_path.empty()) errors.push_back("output_path: must not be empty");
  return errors;
}

std::vector<std::string> ExperimentConfig::warnings() const { return ofdm.warnings(); }

SimulationOptions ExperimentConfig::simulation_options() const {
  SimulationOptions opt;
  opt.realizations_per_drop = realizations_per_drop;
  opt.lmmse_normalizer_realizations = lmmse_normalizer_realizations;
  opt.ul_timing_mode = ul_timing_mode;
  opt.psi_form = psi_form;
  opt.average_over_block = average_over_block;
  opt.ap_power = ap_power;
  opt.ul_power = ul_power;
  return opt;
}

// ---------------------------------------------------------------------------
// Aggregation and output files
// ---------------------------------------------------------------------------

CdfTable aggregate_cdf(std::vector<double> sums) {
  if (sums.empty()) throw std::invalid_argument("aggregate_cdf: empty sample");
  std::sort(sums.begin(), sums.end());
  CdfTable table;
  const std::size_t n = sums.size();
  table.values = std::move(sums);
  table.quantiles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    table.quantiles[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  }
  if (n % 2 == 1) {
    table.median = table.values[n / 2];
  } else {
    table.median = 0.5 * (table.values[n / 2 - 1] + table.values[n / 2]);
  }
  // Nearest-rank 5th percentile.
  const std::size_t rank = static_cast<std::size_t>(
      std::max(1.0, std::ceil(0.05 * static_cast<double>(n))));
  table.p5 = table.values[rank - 1];
  return table;
}

namespace {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, int workers) {
  {
    const std::vector<std::string> violations = cfg.validate();
    if (!violations.empty()) {
      FieldErrors errs;
      errs.errors = violations;
      errs.raise_if_any("run_experiment");
    }
  }

  const int num_drops = cfg.num_drops;
  std::vector<std::uint64_t> seeds(num_drops);
  for (int d = 0; d < num_drops; ++d) {
    seeds[d] = mix_seed({cfg.base_seed, kDropSeedTag, static_cast<std::uint64_t>(d)});
  }

  std::vector<DropOutput> outputs(num_drops);
  {
    std::atomic<int> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto work = [&]() {
      for (;;) {
        const int d = next.fetch_add(1);
        if (d >= num_drops) return;
        try {
          DropSimulator sim(cfg.network, cfg.ofdm, cfg.m0, cfg.simulation_options(), seeds[d]);
          outputs[d] = sim.run(cfg.schemes, cfg.precoders, cfg.clusterers);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    const int thread_count = std::min(resolve_workers(workers), num_drops);
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  fs::create_directories(cfg.output_path);
  ExperimentSummary summary;
  summary.drop_seeds = seeds;

  // One combo per row of a DropOutput; all drops share the layout.
  const std::size_t num_combos = outputs.front().rows.size();
  summary.combos.resize(num_combos);
  for (std::size_t j = 0; j < num_combos; ++j) {
    ComboSummary& combo = summary.combos[j];
    const ComboRow& first = outputs.front().rows[j];
    combo.scheme = first.scheme;
    combo.precoder = first.precoder;
    combo.clusterer = first.clusterer;
    combo.per_drop_sum_se.resize(num_drops);
    for (int d = 0; d < num_drops; ++d) {
      combo.per_drop_sum_se[d] = outputs[d].rows[j].report.sum_se;
    }
    combo.cdf = aggregate_cdf(combo.per_drop_sum_se);
    double mean = 0.0;
    for (double v : combo.per_drop_sum_se) mean += v;
    combo.mean_sum_se = mean / num_drops;
  }

  // results.csv: one row per (drop, combo, user).
  {
    std::ostringstream csv;
    csv << "drop,scheme,precoder,clusterer,user,SINR,SE,sum_SE,diagnostics\r\n";
    for (int d = 0; d < num_drops; ++d) {
      for (const ComboRow& row : outputs[d].rows) {
        Diagnostics row_diag = row.diagnostics;
        summary.total_diagnostics.merge(row.diagnostics);
        const std::string diag_token = row_diag.summary();
        for (Eigen::Index k = 0; k < row.report.sinr.size(); ++k) {
          csv << d << ',' << to_string(row.scheme) << ',' << to_string(row.precoder) << ','
              << to_string(row.clusterer) << ',' << k << ','
              << format_double(row.report.sinr(k)) << ',' << format_double(row.report.se(k))
              << ',' << format_double(row.report.sum_se) << ',' << diag_token << "\r\n";
        }
      }
    }
    summary.results_csv = (fs::path(cfg.output_path) / "results.csv").string();
    write_text_file(summary.results_csv, csv.str());
  }

  // cdf.csv: empirical CDF of per-drop sum SE per combo.
  {
    std::ostringstream csv;
    csv << "scheme,precoder,clusterer,sum_SE,quantile\r\n";
    for (const ComboSummary& combo : summary.combos) {
      for (std::size_t i = 0; i < combo.cdf.values.size(); ++i) {
        csv << to_string(combo.scheme) << ',' << to_string(combo.precoder) << ','
            << to_string(combo.clusterer) << ',' << format_double(combo.cdf.values[i]) << ','
            << format_double(combo.cdf.quantiles[i]) << "\r\n";
      }
    }
    summary.cdf_csv = (fs::path(cfg.output_path) / "cdf.csv").string();
    write_text_file(summary.cdf_csv, csv.str());
  }

  // summary.csv: medians and tails per combo.
  {
    std::ostringstream csv;
    csv << "scheme,precoder,clusterer,num_drops,median_sum_SE,p5_sum_SE,mean_sum_SE\r\n";
    for (const ComboSummary& combo : summary.combos) {
      csv << to_string(combo.scheme) << ',' << to_string(combo.precoder) << ','
          << to_string(combo.clusterer) << ',' << num_drops << ','
          << format_double(combo.cdf.median) << ',' << format_double(combo.cdf.p5) << ','
          << format_double(combo.mean_sum_se) << "\r\n";
    }
    summary.summary_csv = (fs::path(cfg.output_path) / "summary.csv").string();
    write_text_file(summary.summary_csv, csv.str());
  }

  // manifest.json: config echo plus seeds; no volatile fields, so reruns are
  // byte-identical.
  {
    ordered_json manifest;
    manifest["generator"] = {{"name", "cfmimo"},
                             {"version", kVersionString},
                             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                           std::to_string(EIGEN_MINOR_VERSION)}};
    manifest["config"] = ordered_json::parse(config_to_json_text(cfg));
    ordered_json seeds_json = ordered_json::array();
    for (std::uint64_t s : seeds) seeds_json.push_back(s);
    manifest["drop_seeds"] = seeds_json;
    ordered_json warn = ordered_json::array();
    for (const auto& w : cfg.warnings()) warn.push_back(w);
    manifest["warnings"] = warn;
    ordered_json diag;
    diag["psd_clips"] = summary.total_diagnostics.psd_clips;
    diag["floored_denominators"] = summary.total_diagnostics.floored_denominators;
    diag["ill_conditioned_solves"] = summary.total_diagnostics.ill_conditioned_solves;
    diag["regularized_inversions"] = summary.total_diagnostics.regularized_inversions;
    diag["degenerate_pilots"] = summary.total_diagnostics.degenerate_pilots;
    manifest["diagnostics"] = diag;
    manifest["outputs"] = {{"results", "results.csv"},
                           {"cdf", "cdf.csv"},
                           {"summary", "summary.csv"}};
    summary.manifest_json = (fs::path(cfg.output_path) / "manifest.json").string();
    write_text_file(summary.manifest_json, manifest.dump(2) + "\n");
  }

  return summary;
}

bool apply_sweep_parameter(ExperimentConfig* cfg, const std::string& name, double value) {
  const int v = static_cast<int>(std::llround(value));
  if (name == "M") cfg->network.antennas_per_ap = v;
  else if (name == "M0") cfg->m0 = v;
  else if (name == "Q") cfg->network.num_aps = v;
  else if (name == "K") cfg->network.num_users = v;
  else if (name == "num_subcarriers") cfg->ofdm.num_subcarriers = v;
  else return false;
  return true;
}

SweepSummary sweep(const ExperimentConfig& base, const std::string& parameter,
                   std::vector<double> values, int workers) {
  if (values.empty()) throw std::invalid_argument("sweep: values must not be empty");
  {
    ExperimentConfig probe = base;
    if (!apply_sweep_parameter(&probe, parameter, values.front())) {
      throw std::invalid_argument("sweep: unknown parameter '" + parameter +
                                  "' (expected M, M0, Q, K or num_subcarriers)");
    }
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  fs::create_directories(base.output_path);
  std::ostringstream csv;
  csv << "parameter,value,scheme,precoder,clusterer,median_sum_SE,p5_sum_SE,mean_sum_SE\r\n";
  for (double value : values) {
    ExperimentConfig cfg = base;
    apply_sweep_parameter(&cfg, parameter, value);
    std::ostringstream dir;
    dir << "sweep_" << parameter << "_" << static_cast<long long>(std::llround(value));
    cfg.output_path = (fs::path(base.output_path) / dir.str()).string();
    const ExperimentSummary run = run_experiment(cfg, workers);
    for (const ComboSummary& combo : run.combos) {
      csv << parameter << ',' << format_double(value) << ',' << to_string(combo.scheme) << ','
          << to_string(combo.precoder) << ',' << to_string(combo.clusterer) << ','
          << format_double(combo.cdf.median) << ',' << format_double(combo.cdf.p5) << ','
          << format_double(combo.mean_sum_se) << "\r\n";
    }
  }
  SweepSummary out;
  out.values = values;
  out.summary_csv = (fs::path(base.output_path) / "sweep_summary.csv").string();
  write_text_file(out.summary_csv, csv.str());
  return out;
}

}  // namespace cfmimo
