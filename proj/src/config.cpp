#include "tdstab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tdstab/errors.hpp"
#include "tdstab/io.hpp"

namespace tdstab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

FeatureSpec parse_features(const json& j, const std::string& path) {
  FeatureSpec spec;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "identity") {
      spec.kind = FeatureSpec::Kind::Identity;
      return spec;
    }
    if (s.rfind("poly(", 0) == 0 && s.back() == ')') {
      spec.kind = FeatureSpec::Kind::Poly;
      try {
        spec.poly_order = std::stoi(s.substr(5, s.size() - 6));
      } catch (const std::exception&) {
        fail(path, "cannot parse polynomial order in \"" + s + "\"");
      }
      if (spec.poly_order < 1) fail(path, "polynomial order must be >= 1");
      return spec;
    }
    fail(path, "unknown feature spec \"" + s +
               "\" (expected \"identity\", \"poly(k)\", or {\"Phi\": ...})");
  }
  if (j.is_object() && j.contains("Phi")) {
    spec.kind = FeatureSpec::Kind::Inline;
    spec.phi = matrix_from_json(j["Phi"], path + "/Phi");
    return spec;
  }
  fail(path, "expected \"identity\", \"poly(k)\", or {\"Phi\": ...}");
}

MarkovChain parse_chain(const json& j, const std::string& path,
                        const std::filesystem::path& base_dir) {
  if (j.is_object() && j.contains("file")) {
    if (!j["file"].is_string()) fail(path + "/file", "expected a path string");
    const auto file = base_dir / j["file"].get<std::string>();
    if (!std::filesystem::exists(file)) {
      fail(path + "/file", "referenced file does not exist: " + file.string());
    }
    std::ifstream in(file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(path + "/file", "cannot parse " + file.string() + ": " + e.what());
    }
    return chain_from_json(doc, path + "/file:" + file.string());
  }
  return chain_from_json(j, path);
}

std::vector<double> parse_grid(const json& j, const std::string& path) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      grid.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
  } else if (j.is_object()) {
    const double lo = get_number(j.value("log10_min", json()), path + "/log10_min");
    const double hi = get_number(j.value("log10_max", json()), path + "/log10_max");
    const auto points = get_integer(j.value("points", json()), path + "/points");
    if (points < 1) fail(path + "/points", "need at least one grid point");
    if (!(hi >= lo)) fail(path, "log10_max must be >= log10_min");
    for (std::int64_t k = 0; k < points; ++k) {
      const double e = points == 1 ? lo
                                   : lo + (hi - lo) * static_cast<double>(k) /
                                             static_cast<double>(points - 1);
      grid.push_back(std::pow(10.0, e));
    }
  } else {
    fail(path, "expected an array or {log10_min, log10_max, points}");
  }
  if (grid.empty()) fail(path, "grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) fail(path, "grid values must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) {
      fail(path, "grid must be strictly increasing at index " + std::to_string(i));
    }
  }
  return grid;
}

std::optional<double> walk_rho_of(const json& j) {
  if (j.is_object() && j.value("family", "") == "simple_walk" &&
      j.contains("rho") && j["rho"].is_number()) {
    return j["rho"].get<double>();
  }
  return std::nullopt;
}

}  // namespace

Matrix FeatureSpec::resolve(Index n) const {
  switch (kind) {
    case Kind::Identity:
      return Matrix::Identity(n, n);
    case Kind::Poly: {
      if (poly_order > n) {
        throw ConfigError("poly(" + std::to_string(poly_order) +
                          ") features exceed the state count " +
                          std::to_string(n));
      }
      Matrix phi(n, poly_order);
      for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1) / static_cast<double>(n);
        double power = 1.0;
        for (Index j = 0; j < poly_order; ++j) {
          phi(i, j) = power;
          power *= x;
        }
      }
      return phi;
    }
    case Kind::Inline:
      if (phi.rows() != n) {
        throw ConfigError("inline feature matrix has " +
                          std::to_string(phi.rows()) + " rows for a chain on " +
                          std::to_string(n) + " states");
      }
      return phi;
  }
  throw ConfigError("unreachable feature kind");
}

Vector ExperimentConfig::reward_for(Index n) const {
  if (reward) {
    if (reward->size() != n) {
      throw ConfigError("config error at /reward: length " +
                        std::to_string(reward->size()) +
                        " does not match state count " + std::to_string(n));
    }
    return *reward;
  }
  Vector r(n);
  for (Index i = 0; i < n; ++i) {
    r(i) = static_cast<double>(i + 1) / static_cast<double>(n);
  }
  return r;
}

FeatureSetup ExperimentConfig::feature_setup(Index n) const {
  return FeatureSetup::create(features.resolve(n), reward_for(n), gamma);
}

ExperimentConfig config_from_json(const json& j, const std::string& mode,
                                  const std::filesystem::path& base_dir) {
  if (!j.is_object()) {
    throw ConfigError("config error at /: expected a JSON object");
  }
  ExperimentConfig cfg;
  cfg.mode = mode;
  if (j.contains("mode")) {
    if (!j["mode"].is_string() || j["mode"].get<std::string>() != mode) {
      fail("/mode", "config is for mode \"" +
                        j["mode"].dump() + "\" but the \"" + mode +
                        "\" subcommand was invoked");
    }
  }

  if (j.contains("original")) {
    cfg.original = parse_chain(j["original"], "/original", base_dir);
    cfg.walk_rho = walk_rho_of(j["original"]);
  }
  if (j.contains("perturbed")) {
    cfg.perturbed = parse_chain(j["perturbed"], "/perturbed", base_dir);
    cfg.walk_rho_hat = walk_rho_of(j["perturbed"]);
  } else if (cfg.original) {
    cfg.perturbed = cfg.original;
    cfg.walk_rho_hat = cfg.walk_rho;
  }
  if (j.contains("features")) {
    cfg.features = parse_features(j["features"], "/features");
  }
  if (j.contains("reward")) {
    cfg.reward = vector_from_json(j["reward"], "/reward");
  }
  if (j.contains("gamma")) cfg.gamma = get_number(j["gamma"], "/gamma");
  if (j.contains("bisect_tol")) {
    cfg.bisect_tol = get_number(j["bisect_tol"], "/bisect_tol");
  }

  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    if (s.is_object() && s.contains("harmonic")) {
      cfg.schedule = StepSchedule::harmonic(
          get_number(s["harmonic"].value("a", json(0.5)), "/schedule/harmonic/a"),
          get_number(s["harmonic"].value("t0", json(100.0)),
                     "/schedule/harmonic/t0"));
    } else if (s.is_object() && s.contains("constant")) {
      cfg.schedule = StepSchedule::constant(get_number(
          s["constant"].value("alpha", json()), "/schedule/constant/alpha"));
    } else {
      fail("/schedule", "expected {\"harmonic\": {a, t0}} or "
                        "{\"constant\": {alpha}}");
    }
  }

  if (j.contains("T")) {
    cfg.steps = get_integer(j["T"], "/T");
    if (cfg.steps < 1) fail("/T", "step count must be positive");
  }
  if (j.contains("snapshot_every")) {
    cfg.snapshot_every = get_integer(j["snapshot_every"], "/snapshot_every");
    if (cfg.snapshot_every < 1) fail("/snapshot_every", "must be positive");
  } else {
    cfg.snapshot_every = std::max<std::int64_t>(1, cfg.steps / 10);
  }

  if (j.contains("seeds")) {
    if (!j["seeds"].is_array() || j["seeds"].empty()) {
      fail("/seeds", "expected a nonempty array of integers");
    }
    for (std::size_t i = 0; i < j["seeds"].size(); ++i) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(get_integer(
          j["seeds"][i], "/seeds[" + std::to_string(i) + "]")));
    }
  } else if (j.contains("n_seeds")) {
    const auto count = get_integer(j["n_seeds"], "/n_seeds");
    if (count < 1) fail("/n_seeds", "must be positive");
    for (std::int64_t s = 0; s < count; ++s) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }

  if (j.contains("w0")) cfg.w0 = vector_from_json(j["w0"], "/w0");
  if (j.contains("initial_state")) {
    cfg.initial_state =
        static_cast<Index>(get_integer(j["initial_state"], "/initial_state")) - 1;
    if (cfg.initial_state < 0) fail("/initial_state", "states are 1-based");
  }

  if (j.contains("deltas")) cfg.deltas = parse_grid(j["deltas"], "/deltas");
  if (j.contains("rhos")) cfg.rhos = parse_grid(j["rhos"], "/rhos");
  if (j.contains("n")) {
    cfg.family_n = static_cast<Index>(get_integer(j["n"], "/n"));
    if (cfg.family_n < 2) fail("/n", "state count must be at least 2");
  }

  if (j.contains("instances")) {
    if (!j["instances"].is_array() || j["instances"].empty()) {
      fail("/instances", "expected a nonempty array");
    }
    for (std::size_t i = 0; i < j["instances"].size(); ++i) {
      const std::string path = "/instances[" + std::to_string(i) + "]";
      const json& inst = j["instances"][i];
      if (!inst.is_object() || !inst.contains("original") ||
          !inst.contains("perturbed")) {
        fail(path, "instance needs \"original\" and \"perturbed\" chains");
      }
      InstanceSpec spec{
          inst.value("label", "instance_" + std::to_string(i)),
          parse_chain(inst["original"], path + "/original", base_dir),
          parse_chain(inst["perturbed"], path + "/perturbed", base_dir),
          inst.contains("features")
              ? parse_features(inst["features"], path + "/features")
              : cfg.features,
          walk_rho_of(inst["original"]),
          walk_rho_of(inst["perturbed"])};
      cfg.instances.push_back(std::move(spec));
    }
  }

  // Mode-specific presence checks, reported against the config root.
  const bool needs_pair = mode == "analyze" || mode == "simulate";
  if (needs_pair) {
    if (!cfg.original) fail("/original", "required for mode " + mode);
    if (!(cfg.gamma > 0.0)) fail("/gamma", "required for mode " + mode);
  }
  if (mode == "simulate" && cfg.seeds.empty()) {
    fail("/seeds", "simulate needs \"seeds\" or \"n_seeds\"");
  }
  if (mode == "sweep") {
    if (cfg.deltas.empty()) fail("/deltas", "sweep needs a delta grid");
    if (cfg.rhos.empty()) fail("/rhos", "sweep needs a rho list");
  }
  if (mode == "max-gamma" && cfg.instances.empty()) {
    if (cfg.deltas.empty() || cfg.rhos.empty()) {
      fail("/", "max-gamma needs \"instances\" or a family sweep "
                "(\"rhos\" and \"deltas\")");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::string& mode) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open config file " + file.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(column) + ": " + e.what());
  }
  return config_from_json(doc, mode, file.parent_path());
}

}  // namespace tdstab
