#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ymflow/classify.hpp"
#include "ymflow/flow.hpp"
#include "ymflow/weights.hpp"

#include <nlohmann/json.hpp>

namespace ymflow {

struct StartSpec {
  std::string kind = "flat";  // flat | split_standard | snapshot
  std::string path;           // for snapshot
  double gauge_amplitude = 0.0;  // complexified gauge perturbation of the start
  int gauge_modes = 2;
};

struct OutputSpec {
  std::string dir = ".";
  std::string format = "json";  // json | csv
  std::string trace_csv;        // flow trace file name (empty: no trace file)
  std::string snapshot;         // final field snapshot file name
};

struct ExperimentConfig {
  int N = 16;
  MatrixGroupSpec group{2, GroupKind::SU};
  std::vector<long long> twist_degrees;  // defaults to zeros
  bool twist_total_declared = false;
  long long twist_total = 0;
  uint64_t seed = 1;
  int threads = 1;
  StartSpec start;
  FlowConfig flow;
  WeightOptions weight;
  int kn_quad = 256;
  OutputSpec output;
};

/// Parses and validates a config file; fills defaults; rejects unknown fields
/// naming the offending path. Throws ConfigError.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_json(const nlohmann::json& j);
nlohmann::json config_echo(const ExperimentConfig& cfg);

/// Builds the starting connection described by the config.
UnitaryConnection build_start(const ExperimentConfig& cfg);

struct Assertion {
  std::string name;
  double tolerance = 0.0;
  double measured = 0.0;
  bool pass = false;
};

struct ResultRecord {
  std::string command;
  nlohmann::json config;
  nlohmann::json metrics;
  std::vector<Assertion> assertions;
  double wall_time_s = 0.0;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

std::string trace_to_csv(const FlowTrace& trace);

}  // namespace ymflow
