#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hqs/cli/config.hpp"
#include "hqs/error.hpp"

namespace hqs::cli {

enum ExitCode { kOk = 0, kConfigFailure = 2, kNumericalFailure = 3, kValidationFailure = 4 };

/// Thrown when the analytic column disagrees beyond the configured tolerance.
class ValidationFailure : public Error {
 public:
  using Error::Error;
};

struct ResultTable {
  std::vector<double> tau;
  std::vector<double> c_qq;
  std::vector<double> e_oo;
  OscMeasure kind = OscMeasure::none;
  std::vector<double> c_qq_analytic;  // empty unless validation is on
  nlohmann::json meta;

  bool validated() const { return !c_qq_analytic.empty(); }
  double max_residual() const;
};

/// Truncation used for a config: the explicit override, or the rule from
/// `choose_truncation` (plus two levels and a bath floor for Lindblad runs).
HilbertSpec truncation_for(const RunConfig& cfg);

/// Closed-form C_qq at every grid point, when one exists for the config.
std::optional<std::vector<double>> analytic_series(const RunConfig& cfg, const HilbertSpec& spec);

/// Evolves the configured system. Deterministic for a fixed config. With
/// validation on, throws ConfigError if no closed form applies; the
/// residual check itself is left to `check_validation`.
ResultTable run(const RunConfig& cfg);

/// Throws ValidationFailure when max |C_qq - C_qq_analytic| > tolerance.
void check_validation(const ResultTable& table, const RunConfig& cfg);

void write_csv(const ResultTable& table, std::ostream& out);

/// CSV at cfg.output.path, "<path>.meta.json" and optionally a gnuplot
/// script next to it. With an empty path the CSV goes to `fallback`.
void write_outputs(const ResultTable& table, const RunConfig& cfg, std::ostream& fallback);

}  // namespace hqs::cli
