#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "coopnet/errors.hpp"
#include "coopnet/version.hpp"

namespace coopnet::experiment {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns, std::uint64_t config_hash,
                     std::uint64_t seed) : columns_(std::move(columns)) {
  char meta[128];
  std::snprintf(meta, sizeof(meta), "# coopnet %s\n# config-hash: %016llx\n# seed: %llu\n",
                kVersion, static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  body_ = meta;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) body_ += ',';
    body_ += columns_[i];
  }
  body_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& row) {
  if (row.size() != columns_.size())
    throw ConfigError("row width " + std::to_string(row.size()) + " does not match the " +
                      std::to_string(columns_.size()) + "-column schema");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row[i]))
      throw NonConvergence("non-finite value in column '" + columns_[i] + "'");
    if (i) body_ += ',';
    body_ += format_value(row[i]);
  }
  body_ += '\n';
  ++rows_count_;
}

void CsvWriter::write(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file '" + tmp + "'");
    out << body_;
    if (!out) throw ConfigError("failed writing output file '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot move output into place at '" + path + "'");
}

}  // namespace coopnet::experiment
