#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdesign/design_space.hpp"
#include "mmdesign/model.hpp"
#include "mmdesign/solver.hpp"

namespace mmdesign {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class SymmetryMode { Auto, Off, Explicit };

/// Parsed run configuration: one model, one space, a sweep over
/// (estimator, alpha) cases, solver options and output settings.
struct RunConfig {
  int num_vars = 0;
  std::vector<std::string> response_texts;
  std::vector<BasisVector> responses;
  Matrix v0;
  std::vector<double> alphas;
  std::vector<Estimator> estimators;

  std::vector<FactorSpec> factors;
  std::int64_t max_points = 1000000;

  SolverOptions solver;
  double eta2 = 1e-3;

  SymmetryMode symmetry = SymmetryMode::Auto;
  std::vector<int> symmetry_axes_explicit;

  std::string output_dir = "out";
  bool plot_data = true;

  /// Model for one sweep case.
  ResponseModel model_for(Estimator est, double alpha) const;
};

/// Parse a JSON config document. Throws ConfigError with the offending
/// field path on schema violations.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace mmdesign
