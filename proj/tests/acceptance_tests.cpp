// Acceptance suite: end-to-end checks of the analytic bounds, the
// numerical threshold search, and the simulator against their contracts.
// Each case prints one PASS/FAIL line with its runtime.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/generators.hpp"
#include "tdstab/commands.hpp"
#include "tdstab/config.hpp"
#include "tdstab/errors.hpp"
#include "tdstab/io.hpp"
#include "tdstab/simulate.hpp"

using namespace tdstab;
namespace fs = std::filesystem;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string name)
      : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void expect(bool condition, const std::string& detail) {
    if (!condition) {
      ok_ = false;
      if (first_failure_.empty()) first_failure_ = detail;
    }
  }

  ~Criterion() {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    std::printf("[acceptance] %-54s %s  (%.2f s)\n", name_.c_str(),
                ok_ ? "PASS" : "FAIL", seconds);
    std::fflush(stdout);
    CHECK_MESSAGE(ok_, name_, ": ", first_failure_);
  }

 private:
  std::string name_;
  bool ok_ = true;
  std::string first_failure_;
  std::chrono::steady_clock::time_point start_;
};

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

double parse_field(const std::string& field) {
  double value = 0.0;
  const auto result =
      std::from_chars(field.data(), field.data() + field.size(), value);
  REQUIRE(result.ec == std::errc());
  return value;
}

std::vector<std::vector<double>> read_csv_rows(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_field(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("on-policy reduction: every bound collapses to one") {
  Criterion criterion("on-policy reduction (100 chains)");
  SplitMix64 rng(1001);
  for (int trial = 0; trial < 100; ++trial) {
    const MarkovChain chain = gen::random_reversible_chain(rng, 2, 8);
    const Vector bounds = lemma1_gamma_bounds(chain, chain);
    criterion.expect((bounds.array() - 1.0).abs().maxCoeff() <= 1e-12,
                     "per-state bound deviates from 1 beyond 1e-12");
  }
  criterion.expect(theorem2_bound(1.0) == 1.0, "theorem2_bound(1) != 1");
}

TEST_CASE("perturbation-bound sufficiency on 1000 random instances") {
  Criterion criterion("gamma below 2/(c+1) implies negative definite (1000x)");
  SplitMix64 rng(1002);
  for (int trial = 0; trial < 1000; ++trial) {
    const MarkovChain original = gen::random_reversible_chain(rng, 2, 8);
    const MarkovChain perturbed =
        gen::random_perturbation(rng, original, rng.uniform(1.0, 4.0));
    const Index k = 1 + static_cast<Index>(rng.next_below(
                            static_cast<std::uint64_t>(original.size())));
    const Matrix phi = gen::random_features(rng, original.size(), k);

    const double c = perturbation_factor(original, perturbed);
    const double gamma = 0.99 * theorem2_bound(c);
    const FeatureSetup setup =
        FeatureSetup::create(phi, Vector::Zero(original.size()), gamma);
    const auto [a, b] = assemble_A_b(original, perturbed, setup);
    criterion.expect(is_negative_definite(a).is_nd,
                     "A not negative definite at 0.99 * 2/(c+1), c = " +
                         format_number(c));
  }
}

TEST_CASE("bound ordering and the threshold gap on the walk family") {
  Criterion criterion("thm2 <= lemma1 <= max-nd gamma, with a real gap");
  FeatureSpec poly;
  poly.kind = FeatureSpec::Kind::Poly;
  poly.poly_order = 3;
  const Matrix phi = poly.resolve(5);

  std::vector<double> deltas;
  for (int k = 0; k < 41; ++k) {
    deltas.push_back(std::pow(10.0, -2.0 + 4.0 * k / 40.0));
  }
  double best_gap = 0.0;
  for (const double rho : {0.5, 2.0}) {
    for (const double delta : deltas) {
      const MarkovChain original = build_simple_random_walk(5, rho);
      const MarkovChain perturbed = build_simple_random_walk(5, rho * delta);
      const double lemma_min =
          lemma1_gamma_bounds(original, perturbed).minCoeff();
      const double thm2 =
          theorem2_bound(perturbation_factor(original, perturbed));
      const MaxGammaResult max_nd =
          max_nd_gamma(original, perturbed, phi, 1e-9);

      criterion.expect(thm2 <= lemma_min + 1e-9,
                       "thm2 > lemma1 at rho=" + format_number(rho) +
                           " delta=" + format_number(delta));
      criterion.expect(lemma_min <= max_nd.gamma + 1e-9,
                       "lemma1 > max_nd at rho=" + format_number(rho) +
                           " delta=" + format_number(delta) + " (lemma1 " +
                           format_number(lemma_min) + ", max_nd " +
                           format_number(max_nd.gamma) + ")");
      if (delta != 1.0) {
        best_gap = std::max(best_gap, max_nd.gamma - lemma_min);
      }
    }
  }
  criterion.expect(best_gap > 0.01,
                   "largest off-policy gap is only " + format_number(best_gap));
}

TEST_CASE("bound-comparison sweep CSV matches its analytic envelope") {
  Criterion criterion("sweep CSV: unity row, envelope, monotone");
  const fs::path out = fs::temp_directory_path() / "tdstab_acceptance_sweep";
  fs::remove_all(out);

  nlohmann::json doc{
      {"deltas", {{"log10_min", -2.0}, {"log10_max", 2.0}, {"points", 41}}},
      {"rhos", {0.5, 2.0}}};
  const ExperimentConfig cfg = config_from_json(doc, "sweep", ".");
  run_sweep(cfg, RunOptions{out, 0, 1});

  // Columns: delta, thm2, cor1_rho_0.5, cor1_rho_2, limit_inf, limit_0.
  const auto rows = read_csv_rows(out / "bounds.csv");
  criterion.expect(rows.size() == 41, "expected 41 grid rows");
  for (const auto& row : rows) {
    const double delta = row[0];
    const double thm2 = row[1];
    const double limit =
        delta >= 1.0 ? 2.0 / (1.0 + delta) : 2.0 * delta / (1.0 + delta);
    if (delta == 1.0) {
      for (std::size_t c = 1; c < row.size(); ++c) {
        criterion.expect(std::abs(row[c] - 1.0) <= 1e-12,
                         "column " + std::to_string(c) + " not 1 at delta=1");
      }
    }
    criterion.expect(std::abs(thm2 - limit) <= 1e-12,
                     "thm2 deviates from its closed form at delta=" +
                         format_number(delta));
    for (const std::size_t c : {std::size_t(2), std::size_t(3)}) {
      criterion.expect(row[c] >= limit - 1e-12 && row[c] <= 1.0 + 1e-12,
                       "corollary column " + std::to_string(c) +
                           " leaves [thm2-limit, 1] at delta=" +
                           format_number(delta));
    }
  }
  // Monotone nonincreasing in max(delta, 1/delta), per side of 1.
  for (std::size_t c = 1; c <= 5; ++c) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const bool same_side = (rows[r - 1][0] >= 1.0) == (rows[r][0] >= 1.0);
      if (!same_side) continue;
      const bool increasing_m = rows[r][0] >= 1.0;
      const double prev = rows[r - 1][c];
      const double curr = rows[r][c];
      const bool ok = increasing_m ? curr <= prev + 1e-12
                                   : curr >= prev - 1e-12;
      criterion.expect(ok, "column " + std::to_string(c) +
                               " not monotone at row " + std::to_string(r));
    }
  }
  fs::remove_all(out);
}

TEST_CASE("time averages of the update matrix reach their closed form") {
  Criterion criterion("empirical A,b means within 2% at T=1e6");
  const fixtures::WalkPair fx;
  const FeatureSetup setup = fx.setup();
  const SimulationTrace trace =
      td0_run(fx.original, fx.perturbed, setup, fx.schedule(),
              Vector::Zero(3), 1000000, 2026, 1000000);
  const auto [mean_a, mean_b] = empirical_mean_Ab(trace);
  const auto [a, b] = assemble_A_b(fx.original, fx.perturbed, setup);
  const double a_err = spectral_norm(mean_a - a) / spectral_norm(a);
  const double b_err = (mean_b - b).norm() / b.norm();
  criterion.expect(a_err <= 0.02,
                   "relative A error " + format_number(a_err));
  criterion.expect(b_err <= 0.02,
                   "relative b error " + format_number(b_err));
}

TEST_CASE("end-to-end convergence to the zero-PBE fixed point") {
  Criterion criterion("20 seeded runs reach w* within 5%, PBE(w*)=0");
  const fixtures::WalkPair fx;
  const FeatureSetup setup = fx.setup();
  const auto [a, b] = assemble_A_b(fx.original, fx.perturbed, setup);
  const Vector w_star = td_fixed_point(a, b);
  const double pbe =
      projected_bellman_error(w_star, fx.original, fx.perturbed, setup);
  criterion.expect(pbe <= 1e-9, "PBE(w*) = " + format_number(pbe));

  const double scale = w_star.norm();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SimulationTrace trace =
        td0_run(fx.original, fx.perturbed, setup, fx.schedule(),
                Vector::Zero(3), 1000000, seed, 1000000);
    criterion.expect(!trace.diverged,
                     "seed " + std::to_string(seed) + " diverged");
    criterion.expect(trace.final_dist <= 0.05 * scale,
                     "seed " + std::to_string(seed) + " ended at distance " +
                         format_number(trace.final_dist) + " vs scale " +
                         format_number(scale));
  }
}

TEST_CASE("tabular fixed point equals the exact value function") {
  Criterion criterion("identity features: w* = (I - gamma P)^{-1} r (100x)");
  SplitMix64 rng(1007);
  for (int trial = 0; trial < 100; ++trial) {
    const MarkovChain original = gen::random_reversible_chain(rng, 2, 8);
    const MarkovChain perturbed =
        gen::random_perturbation(rng, original, rng.uniform(1.0, 3.0));
    const double gamma = rng.uniform(0.05, 0.95);
    Vector r(original.size());
    for (Index i = 0; i < r.size(); ++i) r(i) = rng.uniform(-2.0, 2.0);

    const FeatureSetup setup = FeatureSetup::create(
        Matrix::Identity(original.size(), original.size()), r, gamma);
    const auto [a, b] = assemble_A_b(original, perturbed, setup);
    const Vector w = td_fixed_point(a, b);
    const Vector v = exact_value_function(original, r, gamma);
    criterion.expect((w - v).cwiseAbs().maxCoeff() <= 1e-9,
                     "tabular fixed point off by " +
                         format_number((w - v).cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("weighted-graph representation round trip and perturbation bound") {
  Criterion criterion("graph round trip (1e-10) and c <= delta^2 (100x)");
  SplitMix64 rng(1008);
  for (int trial = 0; trial < 100; ++trial) {
    const MarkovChain chain = gen::random_reversible_chain(rng, 2, 8);
    const MarkovChain rebuilt = build_graph_walk(to_weighted_graph(chain));
    criterion.expect((rebuilt.transition_matrix() - chain.transition_matrix())
                             .cwiseAbs()
                             .maxCoeff() <= 1e-10,
                     "round trip error above 1e-10");

    const double delta = rng.uniform(1.0, 5.0);
    const WeightedGraph perturbed_graph =
        perturb_graph_weights(to_weighted_graph(chain), delta, rng.next_u64());
    const double c =
        perturbation_factor(chain, build_graph_walk(perturbed_graph));
    criterion.expect(c <= delta * delta * (1.0 + 1e-12),
                     "perturbation factor " + format_number(c) +
                         " exceeds delta^2 = " + format_number(delta * delta));
  }
}
