#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "trimlab/cli/config.hpp"
#include "trimlab/ensemble.hpp"

namespace trimlab::cli {

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct ResultRecord {
  ExperimentConfig config;
  Table table;
  nlohmann::json summary;
  nlohmann::json provenance;  // code version, seed, threads, wall time
  bool passed = true;         // false when a checked identity or bound fails
  std::string diagnostic;
};

inline constexpr const char* kCodeVersion = "trimlab 0.1.0";

/// Validates and dispatches; pure apart from the worker pool (no I/O).
ResultRecord run(const ExperimentConfig& config);

/// The random family described by a configuration.
EnsembleSpec ensemble_of(const ExperimentConfig& config);

struct IdentityResiduals {
  double schur = 0.0;
  double resolvent_in_out = 0.0;
  double resolvent_out_in = 0.0;
  double resolvent_out_out = 0.0;
  double kernel_K = 0.0;
  double s2w_real_0 = 0.0;
  double s2w_real_1 = 0.0;
  double s2w_complex_0 = 0.0;
  double s2w_complex_1 = 0.0;

  std::vector<std::pair<std::string, double>> named() const;
  double max() const;
};

/// Exact identities on realization `sample` of the ensemble at z. X is a seeded random proper subset.
/// The kernel identity uses the ensemble's Gamma when it is a proper subset of the box, else a
/// Bernoulli(1/2) trimming set drawn from the seed.
IdentityResiduals verify_instance(const EnsembleSpec& ens, std::size_t sample, cplx z);

}  // namespace trimlab::cli
