#pragma once

#include "transop/dynamics.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace transop {

/// Parameters shared by every CLI command. Experiments read the fields they
/// need; defaults_for() fills in each experiment's published setup.
struct ExperimentConfig {
  std::string experiment = "reversible";
  double beta = 3.0;
  double c = 0.0;
  double tilt_max = 0.0;
  double tilt_horizon = 3.0;
  double tilt_window = 4.0;
  Index nx = 16;
  Index ny = 16;
  double lo = -1.75;
  double hi = 1.75;
  double lag = 0.1;
  double h = 1e-3;
  std::size_t samples = 100000;
  std::size_t burn_in = 10000;
  std::uint64_t seed = 1;
  /// 0 selects k from the spectral gap.
  int k = 0;
  Index min_count = 5;
  std::vector<double> taus;
  std::string sample_mode = "long-trajectory";
  std::string operator_kind = "forward-backward";
  double omega = 1.0;
  bool directed = false;
  bool layered = false;
  bool row_normalize = false;
  double ridge = 1e-10;
  double bandwidth = 0.0;
  std::string input;
  std::string out = "out";
  Exec exec = Exec::parallel;

  nlohmann::json to_json() const;
};

ExperimentConfig defaults_for(const std::string& experiment);

/// Each run writes its files into cfg.out and returns the report that was
/// written to report.json. Wall-clock timing goes to timing.json.
nlohmann::json run_reversible(const ExperimentConfig& cfg);
nlohmann::json run_nonreversible(const ExperimentConfig& cfg);
nlohmann::json run_time_dependent(const ExperimentConfig& cfg);
nlohmann::json graph_cluster(const ExperimentConfig& cfg);

/// Smaller commands behind the simulate / ulam / edmd / spectrum verbs.
nlohmann::json run_simulate(const ExperimentConfig& cfg);
nlohmann::json run_ulam(const ExperimentConfig& cfg);
nlohmann::json run_edmd(const ExperimentConfig& cfg);
nlohmann::json run_spectrum(const ExperimentConfig& cfg);

nlohmann::json version_info();

}  // namespace transop
