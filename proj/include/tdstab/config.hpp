#ifndef TDSTAB_CONFIG_HPP
#define TDSTAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tdstab/chain.hpp"
#include "tdstab/simulate.hpp"
#include "tdstab/stability.hpp"
#include "tdstab/types.hpp"

namespace tdstab {

/// Feature specification: "identity", "poly(k)" with column j equal to
/// (i/n)^{j-1} over 1-based state indices, or an inline matrix.
struct FeatureSpec {
  enum class Kind { Identity, Poly, Inline };
  Kind kind = Kind::Identity;
  int poly_order = 1;
  Matrix phi;

  Matrix resolve(Index n) const;
};

/// One analysis instance of a max-gamma table.
struct InstanceSpec {
  std::string label;
  MarkovChain original;
  MarkovChain perturbed;
  FeatureSpec features;
  std::optional<double> walk_rho;
  std::optional<double> walk_rho_hat;
};

/// Parsed and validated experiment configuration. Field presence is
/// validated per mode at load time; errors carry the config-path of the
/// offending node.
struct ExperimentConfig {
  std::string mode;
  std::optional<MarkovChain> original;
  std::optional<MarkovChain> perturbed;
  FeatureSpec features;
  std::optional<Vector> reward;
  double gamma = 0.0;
  StepSchedule schedule = StepSchedule::harmonic();
  std::int64_t steps = 100000;
  std::int64_t snapshot_every = 10000;
  std::vector<std::uint64_t> seeds;
  std::optional<Vector> w0;
  Index initial_state = 0;
  double bisect_tol = kBisectTolerance;
  std::vector<double> deltas;
  std::vector<double> rhos;
  Index family_n = 5;
  std::vector<InstanceSpec> instances;
  std::optional<double> walk_rho;
  std::optional<double> walk_rho_hat;

  /// Reward vector, defaulting to r(i) = i/n over 1-based indices.
  Vector reward_for(Index n) const;
  FeatureSetup feature_setup(Index n) const;
};

/// Loads and validates a config file for the given mode. Parse errors
/// are reported with line and column.
ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::string& mode);

/// Same, from an already-parsed document (base_dir resolves chain file
/// references).
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& mode,
                                  const std::filesystem::path& base_dir);

}  // namespace tdstab

#endif  // TDSTAB_CONFIG_HPP
