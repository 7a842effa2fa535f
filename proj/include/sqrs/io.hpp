#pragma once

#include <string>

#include "json.hpp"
#include "sqrs/harness.hpp"

namespace sqrs {

/// Shortest round-trip decimal serialization; locale-independent.
std::string format_double(double value);

/// Parse a flat sectioned key-value config file ([section] / key = value).
/// Unknown sections or keys are rejected with the offending name, so a typo
/// in a security parameter cannot silently fall back to a default.
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Config echo for the JSON summary, and the inverse used by --replay.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// CSV rendering: sweep variables first, then each statistic with its _se
/// companion. Curves carry the bin axis in the first column.
std::string table_csv(const AggregateResult& result);
std::string curves_csv(const AggregateResult& result);

/// Full summary with config echo, master seed and (format == "json") inline
/// table and curves.
nlohmann::ordered_json summary_json(const ExperimentConfig& config,
                                    const AggregateResult& result,
                                    const std::string& format);

struct EmittedFiles {
  std::vector<std::string> paths;
};

/// Write scenario outputs under out_dir with the given file prefix.
/// format "csv": <prefix>_table.csv, <prefix>_curves.csv (if any curves),
/// <prefix>_summary.json. format "json": <prefix>_summary.json only, data
/// inline. Same config and seed produce byte-identical files.
EmittedFiles emit(const ExperimentConfig& config, const AggregateResult& result,
                  const std::string& out_dir, const std::string& prefix,
                  const std::string& format);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace sqrs
