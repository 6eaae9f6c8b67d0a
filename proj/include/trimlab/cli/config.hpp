#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trimlab/disorder.hpp"
#include "trimlab/errors.hpp"
#include "trimlab/lattice.hpp"
#include "trimlab/operators.hpp"

namespace trimlab::cli {

/// Raised for any invalid configuration; maps to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"verify",   "localize", "wegner",      "anomalous",
                                              "dynamics", "couple",   "lattice-info"};
  return names;
}

struct ModelConfig {
  int d = 2;
  std::vector<int> lo{1, 1};
  std::vector<int> hi{5, 5};
  std::string gamma = "full";
  std::string v0 = "zero";
  double g = 1.0;
  DisorderSpec disorder;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct NumericsConfig {
  double s = 1.0 / 3.0;
  double eta = 0.1;
  double energy = 0.0;
  std::vector<double> epsilon{0.01};
  std::vector<double> p{2.0};
  std::vector<double> times{0.0, 1.0, 2.0, 4.0, 8.0};
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: TRIMLAB_THREADS, else hardware
  std::size_t dense_limit = kDefaultDenseLimit;
  std::vector<int> site;  // empty: the box centre
  std::vector<int> box_sizes;  // localize: cubes of these sides centred at site(); empty: the configured box
  std::size_t decoupling_trials = 200;
  double C_s = 0.0;  // 0: estimated empirically

  friend bool operator==(const NumericsConfig&, const NumericsConfig&) = default;
};

struct OutputConfig {
  std::string path = ".";
  std::vector<std::string> formats{"csv", "json"};

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ExperimentConfig {
  std::string experiment = "verify";
  ModelConfig model;
  NumericsConfig numerics;
  OutputConfig output;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  LatticeBox box() const { return make_box(model.d, model.lo, model.hi); }
  SublatticeMask gamma() const { return SublatticeMask::parse(model.gamma); }
  V0Spec v0() const { return V0Spec::parse(model.v0); }
  Site site() const;
};

/// Missing keys take defaults; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

nlohmann::json disorder_to_json(const DisorderSpec& spec);
DisorderSpec disorder_from_json(const nlohmann::json& j);

/// Command-line overrides; set fields replace the file's values.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<double> g, s, eta, energy;
  std::optional<std::vector<double>> epsilon;
  std::optional<std::size_t> samples;
  std::optional<std::string> box;  // "lo..hi" per dimension, comma separated
  std::optional<std::string> gamma;
};

void apply(ExperimentConfig& c, const Overrides& o);

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& c);

/// Thread count: the configured value, else TRIMLAB_THREADS, else available parallelism.
unsigned effective_threads(const ExperimentConfig& c);

}  // namespace trimlab::cli
