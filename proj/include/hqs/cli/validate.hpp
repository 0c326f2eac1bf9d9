#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hqs::cli {

struct ValidationCase {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string error;  // set when the case could not be evaluated

  bool ok() const { return error.empty() && max_residual <= tolerance; }
};

/// Closed form against numerics for every analytic evaluator over a fixed
/// parameter matrix.
std::vector<ValidationCase> validate_all();

/// Table of cases; returns true when all pass.
bool print_report(const std::vector<ValidationCase>& cases, std::ostream& out);

}  // namespace hqs::cli
