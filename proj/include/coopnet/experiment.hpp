#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coopnet/scenario.hpp"

namespace coopnet {

// Flat key = value configuration with dotted sections. '#' starts a comment;
// list values are whitespace-separated; positions are written x,y.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  void set(const std::string& key, const std::string& value);
  // "key=value" as passed on the command line.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<Position> get_positions(const std::string& key,
                                      const std::vector<Position>& fallback) const;

  // Canonical "key = value" lines, sorted; hashed into the CSV metadata.
  std::string canonical_text() const;
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
};

// Exit codes of the experiment runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitAcceptanceFailure = 4;

// Runs the experiment described by the configuration (kind = point,
// relay_sweep, cluster_sweep, fixed_cluster_sweep, random_square,
// throughput_sweep, retransmission_cdf or acceptance), writes CSV files and
// returns an exit code. Failures are reported on stderr.
int run_experiment(const Config& config);

struct AcceptanceOptions {
  double budget = 1.0;  // scales every trial/replicate count
  std::vector<int> only;
  std::uint64_t seed = 20250815;
  int workers = 1;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass() const;
};

// The acceptance matrix; prints one pass/fail line per criterion.
AcceptanceReport run_acceptance(const AcceptanceOptions& options);

}  // namespace coopnet
