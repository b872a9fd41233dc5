#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coopnet::experiment {

// Buffers a whole table and writes it atomically (temp file + rename), so a
// failure mid-run never leaves a partial CSV behind. Serializing a non-finite
// value is a numerical failure by contract.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> columns, std::uint64_t config_hash, std::uint64_t seed);

  void add_row(const std::vector<double>& row);
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_count_; }

 private:
  std::vector<std::string> columns_;
  std::string body_;
  std::size_t rows_count_ = 0;
};

std::string format_value(double v);

}  // namespace coopnet::experiment
