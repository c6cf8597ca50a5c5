#include "tdstab/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <system_error>

#include "tdstab/errors.hpp"

namespace tdstab {

using nlohmann::json;

std::string format_number(double value) {
  char buffer[48];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                    std::chars_format::general, 12);
  if (result.ec != std::errc()) {
    throw NumericError("number formatting failed");
  }
  return std::string(buffer, result.ptr);
}

json matrix_to_json(const Eigen::Ref<const Matrix>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::Ref<const Vector>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(context + ": expected a nonempty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) {
    throw ConfigError(context + "[0]: expected a nonempty numeric row");
  }
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError(context + "[" + std::to_string(i) +
                        "]: rows must all have " + std::to_string(cols) +
                        " entries");
    }
    for (Index k = 0; k < cols; ++k) {
      const auto& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_number()) {
        throw ConfigError(context + "[" + std::to_string(i) + "][" +
                          std::to_string(k) + "]: expected a number");
      }
      m(i, k) = cell.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(context + ": expected a nonempty numeric array");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError(context + "[" + std::to_string(i) +
                        "]: expected a number");
    }
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

json chain_to_json(const MarkovChain& chain) {
  return json{{"n", chain.size()},
              {"P", matrix_to_json(chain.transition_matrix())}};
}

json graph_to_json(const WeightedGraph& graph) {
  return json{{"n", graph.size()}, {"U", matrix_to_json(graph.weights())}};
}

namespace {

double require_number(const json& j, const char* key,
                      const std::string& context) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError(context + "/" + key + ": expected a number");
  }
  return j[key].get<double>();
}

Index require_state_count(const json& j, const std::string& context) {
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw ConfigError(context + "/n: expected an integer state count");
  }
  const auto n = j["n"].get<long long>();
  if (n < 2) {
    throw ConfigError(context + "/n: state count must be at least 2");
  }
  return static_cast<Index>(n);
}

void check_dims(Index n, const Matrix& m, const std::string& context) {
  if (m.rows() != n || m.cols() != n) {
    throw ConfigError(context + ": matrix is " + std::to_string(m.rows()) +
                      "x" + std::to_string(m.cols()) + " but n = " +
                      std::to_string(n));
  }
}

}  // namespace

WeightedGraph graph_from_json(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("U")) {
    throw ConfigError(context + ": expected an object with a \"U\" weight "
                      "matrix");
  }
  Matrix u = matrix_from_json(j["U"], context + "/U");
  if (j.contains("n")) check_dims(require_state_count(j, context), u, context + "/U");
  return WeightedGraph::from_weights(std::move(u));
}

MarkovChain chain_from_json(const json& j, const std::string& context) {
  if (!j.is_object()) {
    throw ConfigError(context + ": expected a chain object");
  }
  if (j.contains("family")) {
    const std::string family = j["family"].is_string()
                                   ? j["family"].get<std::string>()
                                   : "";
    if (family == "simple_walk") {
      return build_simple_random_walk(require_state_count(j, context),
                                      require_number(j, "rho", context));
    }
    if (family == "birth_death") {
      const Index n = require_state_count(j, context);
      if (!j.contains("ratios")) {
        throw ConfigError(context + "/ratios: missing transition ratios");
      }
      Vector ratios = vector_from_json(j["ratios"], context + "/ratios");
      Vector hold = j.contains("hold")
                        ? vector_from_json(j["hold"], context + "/hold")
                        : Vector(Vector::Zero(n));
      return build_birth_death(n, ratios, hold);
    }
    if (family == "graph") {
      return build_graph_walk(graph_from_json(j, context));
    }
    throw ConfigError(context + "/family: unknown family \"" + family +
                      "\" (expected simple_walk, birth_death, or graph)");
  }
  if (j.contains("P")) {
    Matrix p = matrix_from_json(j["P"], context + "/P");
    if (j.contains("n")) check_dims(require_state_count(j, context), p, context + "/P");
    return MarkovChain::from_transition_matrix(std::move(p));
  }
  if (j.contains("U")) {
    return build_graph_walk(graph_from_json(j, context));
  }
  throw ConfigError(context + ": chain needs \"P\", \"U\", or a \"family\" "
                    "constructor");
}

json report_to_json(const StabilityReport& report) {
  json j{{"schema_version", kSchemaVersion},
         {"n", report.n},
         {"K", report.k},
         {"gamma", report.gamma},
         {"A", matrix_to_json(report.A)},
         {"b", vector_to_json(report.b)},
         {"D", matrix_to_json(report.D)},
         {"min_sym_eig", report.min_sym_eig},
         {"is_nd", report.is_nd},
         {"lemma1_bounds", vector_to_json(report.lemma1_bounds)},
         {"lemma1_min", report.lemma1_min},
         {"perturbation_c", report.perturbation_c},
         {"theorem2_bound", report.theorem2},
         {"max_nd_gamma", report.max_nd_gamma},
         {"nd_nowhere", report.nd_nowhere}};
  if (report.corollary1) j["corollary1_bound"] = *report.corollary1;
  if (report.w_star) j["w_star"] = vector_to_json(*report.w_star);
  if (report.pbe_at_w_star) j["pbe_at_w_star"] = *report.pbe_at_w_star;
  return j;
}

void validate_report_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version") ||
      j["schema_version"] != kSchemaVersion) {
    throw ConfigError("report: missing or unsupported schema_version");
  }
  for (const char* key : {"n", "K", "gamma", "A", "b", "D", "min_sym_eig",
                          "is_nd", "lemma1_bounds", "lemma1_min",
                          "theorem2_bound", "max_nd_gamma"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("report: missing field \"") + key + "\"");
    }
  }
}

json schedule_to_json(const StepSchedule& schedule) {
  if (schedule.kind == StepSchedule::Kind::Harmonic) {
    return json{{"harmonic", {{"a", schedule.a}, {"t0", schedule.t0}}}};
  }
  return json{{"constant", {{"alpha", schedule.alpha}}},
              {"robbins_monro", false}};
}

json trace_summary_json(const SimulationTrace& trace) {
  json j{{"schema_version", kSchemaVersion},
         {"seed", trace.seed},
         {"steps", trace.steps},
         {"diverged", trace.diverged},
         {"schedule", schedule_to_json(trace.schedule)},
         {"w_final", vector_to_json(trace.w_final)},
         {"final_dist", trace.final_dist}};
  if (trace.w_star) j["w_star"] = vector_to_json(*trace.w_star);
  if (trace.final_pbe) j["final_pbe"] = *trace.final_pbe;
  return j;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  const Index k = trace.w_final.size();
  out << "t";
  for (Index i = 0; i < k; ++i) out << ",w_" << (i + 1);
  out << ",dist_to_wstar\n";
  for (const Snapshot& snap : trace.snapshots) {
    out << snap.t;
    for (Index i = 0; i < k; ++i) out << "," << format_number(snap.w(i));
    out << "," << format_number(snap.dist_to_wstar) << "\n";
  }
}

}  // namespace tdstab
