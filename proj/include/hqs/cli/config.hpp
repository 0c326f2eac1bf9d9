#pragma once

// Run configuration: a versioned JSON document plus dotted-path overrides.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqs/entanglement.hpp"
#include "hqs/evolve.hpp"
#include "hqs/model.hpp"
#include "hqs/states.hpp"

namespace hqs::cli {

inline constexpr int kSchemaVersion = 1;

struct GridSpec {
  double tau_max = 10.0;
  int n_samples = 401;
};

struct LindbladConfig {
  LindbladSpec rates;
  std::optional<double> step;
};

struct ValidationConfig {
  bool enabled = false;
  double tolerance = 1e-8;
};

struct OutputConfig {
  std::string path;  // empty: CSV to stdout, no sidecar
  bool gnuplot = false;
};

struct RunConfig {
  std::string name = "run";
  SystemParams system;
  InitialStateSpec initial;
  GridSpec grid;
  std::optional<LindbladConfig> lindblad;
  OscMeasure measure = OscMeasure::log_negativity;
  std::optional<HilbertSpec> truncation;
  ValidationConfig validation;
  OutputConfig output;
};

/// Throws ConfigError with the offending key path on any schema violation
/// (unknown keys, wrong types, physical constraints).
/// Concurrence when the oscillator pair provably stays inside {|0>,|1>}
/// (vacuum oscillators, no BS/DD mixing for psi2, no thermal pumping),
/// log negativity otherwise. Used when a config does not name a measure.
OscMeasure default_measure(const RunConfig& cfg);

RunConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json load_json(const std::string& path);

/// Sets `doc[path]` from a flag such as "--system.r-b" (dashes map to
/// underscores). The value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& flag, const std::string& value);

/// Accepts a number or "pi", "pi/12", "2*pi/3" style strings.
double parse_angle(const nlohmann::json& v, const std::string& where);

}  // namespace hqs::cli
