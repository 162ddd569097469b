#pragma once

// Declarative experiments: a JSON spec in, a JSON report out.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppt/io.hpp"

namespace ppt {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum class ExperimentKind { distance, sample, bound, estimate, tail, isoperimetry, verify };

std::string_view to_string(ExperimentKind k) noexcept;
ExperimentKind experiment_kind_from_string(std::string_view name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::verify;
  Json parameters = Json::object();
  SeedSpec seed{};
  /// Unset means the kind's own default.
  std::optional<std::size_t> n_samples;
  std::string output_path;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Strict: unknown keys and wrongly typed values raise a validation error
/// naming the offending field path.
ExperimentSpec parse_experiment_spec(const Json& j);
ExperimentSpec parse_experiment_spec_text(std::string_view text);
Json to_json(const ExperimentSpec& spec);

struct Report {
  ExperimentSpec spec;
  /// Named entries, each with a "type" of scalar, estimate, bound, check,
  /// flag, configuration or table.
  Json results = Json::array();
  /// False when any check entry failed.
  bool passed = true;
  std::int64_t wall_time_ms = 0;
  std::string library_version{kLibraryVersion};
  /// CSV side table (tail grids), with the path requested for it.
  std::string csv;
  std::string csv_path;
};

Json to_json(const Report& report);
/// Pretty-printed JSON followed by a newline.
std::string serialize(const Report& report);

struct RunOptions {
  /// When false wall_time_ms is reported as 0, so repeated runs serialize identically.
  bool record_timing = true;
};

Report run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// Names accepted by the verify kind's "scenario" parameter.
const std::vector<std::string>& verify_scenarios();

}  // namespace ppt
