#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stclt/hecke.hpp"
#include "stclt/measures.hpp"

namespace stclt::cli {

// One (weight, prime) slice of an eigenvalue table; values in the table's
// form order.
struct CacheRecord {
  std::uint32_t weight = 0;
  std::uint32_t prime = 0;
  std::vector<double> values;
  double residual_max = 0;
};

inline constexpr char kCacheMagic[6] = {'S', 'T', 'C', 'L', 'T', 0x01};

// Throws Error on a malformed file; a missing file reads as empty.
std::vector<CacheRecord> read_cache(const std::filesystem::path& path);
// Sorts by (weight, prime), rejects duplicates and out-of-range values, and
// replaces the file through a temporary sibling and rename.
void write_cache(const std::filesystem::path& path, std::vector<CacheRecord> records);

std::vector<CacheRecord> records_from_table(const EigenvalueTable& table);
// Per-prime residuals come back as the stored per-record maximum.
std::optional<EigenvalueTable> table_from_cache(const std::vector<CacheRecord>& records, int weight,
                                               long pmax);

struct RunConfig {
  std::vector<int> weights;
  long pmax = 29;
  double x = 10;
  std::vector<RealInterval> intervals{{-1, 1}};
  std::optional<int> M;
  std::vector<int> M_list;
  int moment_max = 4;
  int p = 2;
  std::string cache;
  std::string out_dir = ".";
  int threads = 1;
  std::string config_file;
};

// "12,24,36", "12:60" (even weights), "500:2000:500", or mixtures joined by ','.
std::vector<int> parse_weights(const std::string& spec);
// "-1:1;0:1.5" or "[-1,1],[0,1.5]".
std::vector<RealInterval> parse_intervals(const std::string& spec);
std::vector<int> parse_int_list(const std::string& spec);

// Flat key = value lines, '#' comments. Unknown keys are an error.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
void apply_config(RunConfig& config, const std::map<std::string, std::string>& kv);
void validate(const RunConfig& config);

}  // namespace stclt::cli
