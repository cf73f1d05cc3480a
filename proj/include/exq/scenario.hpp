#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exq/inference.hpp"
#include "exq/knowledge.hpp"

namespace exq::scenario {

inline constexpr const char* kSchemaId = "exchange-q/v1";
inline constexpr const char* kToolVersion = "0.1.0";

struct CheckRow {
  std::string object;
  std::string check;
  bool pass = false;
  double magnitude = 0.0; // measured deviation (0 when not applicable)
  std::string note;
};

struct ValidationReport {
  std::vector<CheckRow> rows;
  bool ok = true;

  std::string text() const;
  nlohmann::ordered_json to_json() const;
};

struct Scenario {
  nlohmann::ordered_json config;

  GptSystem system;
  std::optional<HermitianBasis> basis; // quantum systems only
  MeasurementRegistry registry;
  PriorSpec prior;
  std::size_t particle_count = 0;
  std::map<std::string, ExperimentRecord> records;
  std::vector<nlohmann::ordered_json> queries;
};

Scenario load_file(const std::string& path);
Scenario load_string(const std::string& text);

// Re-measures every constructor invariant of the config and tabulates the
// results. Structural/schema problems still throw.
ValidationReport validate_config(const nlohmann::ordered_json& config);
ValidationReport validate_file(const std::string& path);

struct RunOptions {
  int threads = 1;
};

nlohmann::ordered_json run(const Scenario& scenario, const RunOptions& options);

void write_report(const nlohmann::ordered_json& report, const std::string& path);

nlohmann::ordered_json tolerance_table();

} // namespace exq::scenario
