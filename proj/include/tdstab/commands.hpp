#ifndef TDSTAB_COMMANDS_HPP
#define TDSTAB_COMMANDS_HPP

#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "tdstab/config.hpp"

namespace tdstab {

struct RunOptions {
  std::filesystem::path out_dir;
  std::uint64_t seed_offset = 0;
  int jobs = 1;
};

/// Writes report.json and summary.txt; returns the report document.
nlohmann::json run_analyze(const ExperimentConfig& cfg, const RunOptions& opt);

/// Writes one trace CSV per seed plus summary.json; returns the summary.
/// Divergence is a reported outcome, not a failure.
nlohmann::json run_simulate(const ExperimentConfig& cfg, const RunOptions& opt);

/// Writes bounds.csv over the delta grid; returns {path, rows}.
nlohmann::json run_sweep(const ExperimentConfig& cfg, const RunOptions& opt);

/// Writes max_gamma.csv, one row per instance; returns the table.
nlohmann::json run_max_gamma(const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace tdstab

#endif  // TDSTAB_COMMANDS_HPP
