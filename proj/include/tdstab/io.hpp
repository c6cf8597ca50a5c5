#ifndef TDSTAB_IO_HPP
#define TDSTAB_IO_HPP

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "tdstab/graph.hpp"
#include "tdstab/simulate.hpp"
#include "tdstab/stability.hpp"
#include "tdstab/types.hpp"

namespace tdstab {

inline constexpr int kSchemaVersion = 1;

/// Locale-independent decimal formatting with 12 significant digits.
std::string format_number(double value);

nlohmann::json matrix_to_json(const Eigen::Ref<const Matrix>& m);
nlohmann::json vector_to_json(const Eigen::Ref<const Vector>& v);

/// Parses a row-major numeric matrix; `context` prefixes error messages
/// with the config path of the offending node.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& context);
Vector vector_from_json(const nlohmann::json& j, const std::string& context);

nlohmann::json chain_to_json(const MarkovChain& chain);
nlohmann::json graph_to_json(const WeightedGraph& graph);

/// Accepts { "n", "P" }, { "n", "U" }, or a constructor form
/// { "family": "simple_walk" | "birth_death" | "graph", ... }.
MarkovChain chain_from_json(const nlohmann::json& j, const std::string& context);
WeightedGraph graph_from_json(const nlohmann::json& j,
                              const std::string& context);

nlohmann::json report_to_json(const StabilityReport& report);
/// Schema check used by the round-trip contract on emitted reports.
void validate_report_json(const nlohmann::json& j);

nlohmann::json schedule_to_json(const StepSchedule& schedule);
nlohmann::json trace_summary_json(const SimulationTrace& trace);

/// Columns t, w_1..w_K, dist_to_wstar; one row per snapshot.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

}  // namespace tdstab

#endif  // TDSTAB_IO_HPP
