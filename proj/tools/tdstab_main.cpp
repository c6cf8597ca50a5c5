#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tdstab/commands.hpp"
#include "tdstab/config.hpp"
#include "tdstab/errors.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonArgs {
  std::string config;
  std::string out;
  std::uint64_t seed_offset = 0;
  int jobs = 1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "experiment config (JSON)")
      ->required();
  sub->add_option("--out", args.out, "output directory")->required();
  sub->add_option("--seed-offset", args.seed_offset,
                  "added to every configured seed");
  sub->add_option("--jobs", args.jobs, "max concurrent instances")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis and simulation of off-policy TD(0) with "
               "linear features on reversible Markov chains"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "stability report for one chain pair");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "seeded TD(0) runs with convergence diagnostics");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "discount-bound curves over a perturbation grid (CSV)");
  CLI::App* max_gamma = app.add_subcommand(
      "max-gamma", "numerical stability thresholds vs analytic bounds");
  for (CLI::App* sub : {analyze, simulate, sweep, max_gamma}) {
    add_common(sub, args);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string mode = analyze->parsed()    ? "analyze"
                           : simulate->parsed() ? "simulate"
                           : sweep->parsed()    ? "sweep"
                                                : "max-gamma";
  try {
    const tdstab::ExperimentConfig cfg = tdstab::load_config(args.config, mode);
    const tdstab::RunOptions opt{args.out, args.seed_offset, args.jobs};
    if (mode == "analyze") {
      tdstab::run_analyze(cfg, opt);
    } else if (mode == "simulate") {
      tdstab::run_simulate(cfg, opt);
    } else if (mode == "sweep") {
      tdstab::run_sweep(cfg, opt);
    } else {
      tdstab::run_max_gamma(cfg, opt);
    }
  } catch (const tdstab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const tdstab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericError;
  }
  return 0;
}
