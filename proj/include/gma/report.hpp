#pragma once

// Design files and machine-readable reports.
//
// Design file:
//   levels: 2,3,3,3
//   0,0,1,2
//   1,2,0,1
//   ...
// one line per run, 0-based level indices separated by commas.

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gma/factorial.hpp"
#include "gma/gwlp.hpp"
#include "gma/solver.hpp"

namespace gma {

class DesignParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DesignFile {
  FactorSpec spec;
  DesignMatrix design;
};

/// Throws DesignParseError naming the line (and column, for level errors).
DesignFile parse_design(std::istream& in);
DesignFile read_design_file(const std::string& path);

void write_design(std::ostream& out, const FactorSpec& spec, const DesignMatrix& design);

/// Two-decimal rendering used in tables.
std::string display_value(double value);

struct ConstructReport {
  FactorSpec spec;
  std::int64_t runs = 0;
  SolverConfig config;
  GmaResult result;
  DesignMatrix design;
  /// Omitted from the JSON as null when absent.
  std::optional<double> elapsed_s;
};

/// {levels, runs, wlp, wlp_display, strength, is_oa, steps, seed, mode,
///  elapsed_s, proven, design}
nlohmann::ordered_json to_json(const ConstructReport& report);
std::string to_text(const ConstructReport& report);

struct EvaluationReport {
  FactorSpec spec;
  std::int64_t runs = 0;
  WordlengthPattern wlp;          // quadratic route
  WordlengthPattern wlp_oracle;   // character route
  double max_discrepancy = 0.0;
  int strength_wlp = 0;
  int strength_coefficients = 0;
  int strength_projection = 0;

  bool paths_agree(double tol = 1e-8) const;
  bool strengths_agree() const {
    return strength_wlp == strength_coefficients && strength_wlp == strength_projection;
  }
};

/// Runs both pattern routes and all three strength checks on a design.
EvaluationReport evaluate_design(const DesignFile& file);

nlohmann::ordered_json to_json(const EvaluationReport& report);
std::string to_text(const EvaluationReport& report);

}  // namespace gma
