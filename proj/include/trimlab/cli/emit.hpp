#pragma once

#include <string>
#include <vector>

#include "trimlab/cli/experiments.hpp"

namespace trimlab::cli {

/// 17 significant digits, lowercase scientific; nan / inf / -inf spelled out.
std::string format_double(double v);

std::string to_csv(const Table& table);

/// {"config", "summary", "provenance", "passed"} with the config echo reparseable by parse_config.
nlohmann::json to_json(const ResultRecord& record);

/// Writes <path>/<experiment>.csv and .json as configured; returns the written paths.
std::vector<std::string> emit(const ResultRecord& record);

}  // namespace trimlab::cli
