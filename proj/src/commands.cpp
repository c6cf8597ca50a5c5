#include "tdstab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "tdstab/errors.hpp"
#include "tdstab/io.hpp"

namespace tdstab {

using nlohmann::json;

namespace {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("TDSTAB_LOG");
    if (env == nullptr) return 1;
    const std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[tdstab] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[tdstab:debug] " << msg << "\n";
}

void parallel_for(int jobs, std::size_t count,
                  const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  if (error) std::rethrow_exception(error);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw NumericError("cannot open output file " + path.string());
  }
  return out;
}

void ensure_out_dir(const RunOptions& opt) {
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) {
    throw NumericError("cannot create output directory " +
                       opt.out_dir.string() + ": " + ec.message());
  }
}

std::string analysis_verdict(const StabilityReport& r) {
  const bool on_policy_like = std::isfinite(r.theorem2) && r.theorem2 >= 1.0 - 1e-12;
  if (on_policy_like) {
    return "on-policy regime: converges for all gamma in (0,1)";
  }
  if (std::isfinite(r.theorem2) && std::abs(r.gamma - r.theorem2) < 1e-15) {
    return "gamma sits exactly on the perturbation bound: boundary, no "
           "guarantee";
  }
  if (std::isfinite(r.theorem2) && r.gamma < r.theorem2) {
    return "gamma below the perturbation bound 2/(c+1): convergence "
           "guaranteed";
  }
  if (r.gamma < r.lemma1_min) {
    return "gamma below every per-state bound: A negative definite, "
           "convergence guaranteed";
  }
  if (r.is_nd) {
    return "A is negative definite at this gamma (numerically); no analytic "
           "guarantee applies";
  }
  return "A is NOT negative definite: TD(0) may diverge at this gamma";
}

std::string analysis_summary_text(const StabilityReport& r) {
  std::ostringstream out;
  out << "stability analysis (n=" << r.n << ", K=" << r.k
      << ", gamma=" << format_number(r.gamma) << ")\n";
  if (std::isfinite(r.perturbation_c)) {
    out << "  perturbation factor c      = " << format_number(r.perturbation_c)
        << "\n"
        << "  theorem-2 bound 2/(c+1)    = " << format_number(r.theorem2)
        << "\n";
  } else {
    out << "  perturbation factor c      = undefined (asymmetric support)\n";
  }
  out << "  lemma-1 bound (min over i) = " << format_number(r.lemma1_min)
      << "\n";
  if (r.corollary1) {
    out << "  corollary-1 bound          = " << format_number(*r.corollary1)
        << "\n";
  }
  out << "  numerical max n.d. gamma   = " << format_number(r.max_nd_gamma)
      << (r.nd_nowhere ? "  (A not n.d. anywhere in (0,1))" : "") << "\n"
      << "  A negative definite        = " << (r.is_nd ? "yes" : "no")
      << "  (margin " << format_number(r.min_sym_eig) << ")\n";
  if (r.w_star) {
    out << "  w* =";
    for (Index i = 0; i < r.w_star->size(); ++i) {
      out << " " << format_number((*r.w_star)(i));
    }
    out << "\n  PBE(w*) = " << format_number(r.pbe_at_w_star.value_or(0.0))
        << "\n";
  } else {
    out << "  w* unavailable: A is singular at this gamma\n";
  }
  out << "  verdict: " << analysis_verdict(r) << "\n";
  return out.str();
}

StabilityReport analyze_from_config(const ExperimentConfig& cfg) {
  const MarkovChain& original = *cfg.original;
  const MarkovChain& perturbed = cfg.perturbed ? *cfg.perturbed : original;
  AnalyzeOptions options;
  options.simple_walk_rho = cfg.walk_rho;
  options.simple_walk_rho_hat = cfg.walk_rho_hat;
  options.bisect_tol = cfg.bisect_tol;
  return analyze(original, perturbed, cfg.feature_setup(original.size()),
                 options);
}

double cor1_limit_rho_inf(double delta) {
  return std::min(1.0, 2.0 / (1.0 + delta));
}

double cor1_limit_rho_0(double delta) {
  return std::min(1.0, 2.0 * delta / (1.0 + delta));
}

}  // namespace

json run_analyze(const ExperimentConfig& cfg, const RunOptions& opt) {
  ensure_out_dir(opt);
  const StabilityReport report = analyze_from_config(cfg);
  const json doc = report_to_json(report);
  validate_report_json(doc);

  open_output(opt.out_dir / "report.json") << doc.dump(2) << "\n";
  const std::string summary = analysis_summary_text(report);
  open_output(opt.out_dir / "summary.txt") << summary;
  std::cout << summary;
  log_debug("report written to " + (opt.out_dir / "report.json").string());
  return doc;
}

json run_simulate(const ExperimentConfig& cfg, const RunOptions& opt) {
  ensure_out_dir(opt);
  const MarkovChain& original = *cfg.original;
  const MarkovChain& perturbed = cfg.perturbed ? *cfg.perturbed : original;
  const FeatureSetup setup = cfg.feature_setup(original.size());
  const Vector w0 = cfg.w0 ? *cfg.w0 : Vector(Vector::Zero(setup.k()));

  std::vector<std::uint64_t> seeds = cfg.seeds;
  for (auto& seed : seeds) seed += opt.seed_offset;

  std::vector<SimulationTrace> traces(seeds.size());
  parallel_for(opt.jobs, seeds.size(), [&](std::size_t i) {
    traces[i] = td0_run(original, perturbed, setup, cfg.schedule, w0,
                        cfg.steps, seeds[i], cfg.snapshot_every,
                        cfg.initial_state);
    log_debug("seed " + std::to_string(seeds[i]) + " final distance " +
              format_number(traces[i].final_dist));
  });

  json per_seed = json::array();
  std::vector<double> final_dists;
  std::vector<double> final_pbes;
  int divergence_count = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const SimulationTrace& trace = traces[i];
    auto csv = open_output(opt.out_dir /
                           ("trace_seed" + std::to_string(seeds[i]) + ".csv"));
    write_trace_csv(csv, trace);
    json row = trace_summary_json(trace);
    per_seed.push_back(std::move(row));
    if (trace.diverged) ++divergence_count;
    if (std::isfinite(trace.final_dist)) final_dists.push_back(trace.final_dist);
    if (trace.final_pbe) final_pbes.push_back(*trace.final_pbe);
  }

  const auto median = [](std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };

  json summary{{"schema_version", kSchemaVersion},
               {"T", cfg.steps},
               {"gamma", cfg.gamma},
               {"schedule", schedule_to_json(cfg.schedule)},
               {"seeds", seeds},
               {"per_seed", std::move(per_seed)},
               {"divergence_count", divergence_count},
               {"median_final_dist", median(final_dists)},
               {"median_final_pbe", median(final_pbes)}};
  if (traces.front().w_star) {
    summary["w_star"] = vector_to_json(*traces.front().w_star);
  }
  open_output(opt.out_dir / "summary.json") << summary.dump(2) << "\n";
  log_info("simulate: " + std::to_string(seeds.size()) + " runs, " +
           std::to_string(divergence_count) + " diverged, median distance " +
           format_number(summary["median_final_dist"].get<double>()));
  return summary;
}

json run_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
  ensure_out_dir(opt);
  std::ostringstream head;
  head << "delta,thm2";
  for (const double rho : cfg.rhos) head << ",cor1_rho_" << format_number(rho);
  head << ",cor1_limit_rho_inf,cor1_limit_rho_0";

  std::vector<std::string> lines(cfg.deltas.size());
  parallel_for(opt.jobs, cfg.deltas.size(), [&](std::size_t i) {
    const double delta = cfg.deltas[i];
    std::ostringstream row;
    row << format_number(delta) << ","
        << format_number(theorem2_bound(std::max(delta, 1.0 / delta)));
    for (const double rho : cfg.rhos) {
      row << "," << format_number(corollary1_bound(rho, delta));
    }
    row << "," << format_number(cor1_limit_rho_inf(delta)) << ","
        << format_number(cor1_limit_rho_0(delta));
    lines[i] = row.str();
  });

  auto csv = open_output(opt.out_dir / "bounds.csv");
  csv << head.str() << "\n";
  for (const auto& line : lines) csv << line << "\n";
  log_info("sweep: " + std::to_string(cfg.deltas.size()) +
           " grid rows written to bounds.csv");
  return json{{"path", (opt.out_dir / "bounds.csv").string()},
              {"rows", cfg.deltas.size()},
              {"header", head.str()}};
}

json run_max_gamma(const ExperimentConfig& cfg, const RunOptions& opt) {
  ensure_out_dir(opt);
  std::vector<InstanceSpec> instances = cfg.instances;
  if (instances.empty()) {
    for (const double rho : cfg.rhos) {
      for (const double delta : cfg.deltas) {
        const double rho_hat = rho * delta;
        InstanceSpec spec{
            "rho=" + format_number(rho) + " delta=" + format_number(delta),
            build_simple_random_walk(cfg.family_n, rho),
            build_simple_random_walk(cfg.family_n, rho_hat),
            cfg.features,
            rho,
            rho_hat};
        instances.push_back(std::move(spec));
      }
    }
  }

  json rows = json::array();
  std::vector<json> row_storage(instances.size());
  parallel_for(opt.jobs, instances.size(), [&](std::size_t i) {
    const InstanceSpec& inst = instances[i];
    const Matrix phi = inst.features.resolve(inst.original.size());
    const Vector bounds = lemma1_gamma_bounds(inst.original, inst.perturbed);
    const double lemma1_min = bounds.minCoeff();
    const double c = perturbation_factor(inst.original, inst.perturbed);
    const MaxGammaResult max_gamma =
        max_nd_gamma(inst.original, inst.perturbed, phi, cfg.bisect_tol);
    json row{{"label", inst.label},
             {"lemma1_min", lemma1_min},
             {"thm2", theorem2_bound(c)},
             {"max_nd_gamma", max_gamma.gamma},
             {"nd_nowhere", max_gamma.never_nd},
             {"gap", max_gamma.gamma - lemma1_min}};
    if (inst.walk_rho && inst.walk_rho_hat) {
      row["cor1"] = corollary1_bound(*inst.walk_rho,
                                     *inst.walk_rho_hat / *inst.walk_rho);
    }
    row_storage[i] = std::move(row);
  });
  for (auto& row : row_storage) rows.push_back(std::move(row));

  auto csv = open_output(opt.out_dir / "max_gamma.csv");
  csv << "label,lemma1_min,thm2,cor1,max_nd_gamma,gap\n";
  for (const auto& row : rows) {
    csv << row["label"].get<std::string>() << ","
        << format_number(row["lemma1_min"].get<double>()) << ","
        << format_number(row["thm2"].get<double>()) << ","
        << (row.contains("cor1") ? format_number(row["cor1"].get<double>())
                                 : std::string())
        << "," << format_number(row["max_nd_gamma"].get<double>()) << ","
        << format_number(row["gap"].get<double>()) << "\n";
  }

  std::cout << "label                          lemma1_min   thm2      "
               "max_nd_gamma  gap\n";
  for (const auto& row : rows) {
    std::ostringstream line;
    line << row["label"].get<std::string>();
    std::string label = line.str();
    label.resize(30, ' ');
    std::cout << label << " " << format_number(row["lemma1_min"].get<double>())
              << "  " << format_number(row["thm2"].get<double>()) << "  "
              << format_number(row["max_nd_gamma"].get<double>()) << "  "
              << format_number(row["gap"].get<double>()) << "\n";
  }
  json result{{"schema_version", kSchemaVersion}, {"rows", std::move(rows)}};
  open_output(opt.out_dir / "max_gamma.json") << result.dump(2) << "\n";
  return result;
}

}  // namespace tdstab
