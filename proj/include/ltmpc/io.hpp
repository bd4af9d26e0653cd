#pragma once

// JSON and CSV serialization. Files carry angles in degrees; everything in
// memory is in radians.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "ltmpc/guidance.hpp"

namespace ltmpc {

using Json = nlohmann::ordered_json;

/// Malformed or out-of-range input. `where` is a JSON pointer or "line:col".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), location(where) {}
  std::string location;
};

struct OutputSpec {
  std::string dir = "out";
  std::string log = "log.json";
  std::string csv = "nodes.csv";
  bool plots = true;
};

struct ScenarioFile {
  Scenario scenario;
  OutputSpec output;
};

/// Parses text with line/column diagnostics, then validates against the
/// scenario schema (unknown keys rejected).
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::filesystem::path& path);
Json scenario_to_json(const ScenarioFile& file);

/// JSON Schema (draft 2020-12) describing the scenario format.
Json scenario_schema();

Json log_to_json(const GuidanceLog& log);
GuidanceLog log_from_json(const Json& j);

/// Column order: t_s, x_km, y_km, z_km, vx_kms, vy_kms, vz_kms, m_kg,
/// aR_kms2, aT_kms2, aN_kms2, eta, dv_cum_ms.
std::string nodes_to_csv(const std::vector<NodeRecord>& nodes);
std::vector<NodeRecord> nodes_from_csv(const std::string& text);

Json reference_to_json(const ReferenceTrajectory& ref);
ReferenceTrajectory reference_from_json(const Json& j);

Json problem_to_json(const SegmentProblem& p);
SegmentProblem problem_from_json(const Json& j);
Json solution_to_json(const SegmentSolution& s);

/// Text file helpers; failures raise std::system_error.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal form, used for CSV cells.
std::string format_double(double x);

}  // namespace ltmpc
