#include "trimlab/cli/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace trimlab::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const ResultRecord& record) {
  nlohmann::json j{{"config", to_json(record.config)},
                   {"summary", record.summary},
                   {"provenance", record.provenance},
                   {"passed", record.passed}};
  if (!record.diagnostic.empty()) j["diagnostic"] = record.diagnostic;
  return j;
}

std::vector<std::string> emit(const ResultRecord& record) {
  std::filesystem::path dir(record.config.output.path);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const auto& f : record.config.output.formats) {
    auto p = dir / (record.config.experiment + "." + f);
    write_file(p, f == "csv" ? to_csv(record.table) : to_json(record).dump(2) + "\n");
    written.push_back(p.string());
  }
  return written;
}

}  // namespace trimlab::cli
