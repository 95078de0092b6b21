#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mmdesign/basis.hpp"
#include "mmdesign/linalg.hpp"

namespace mmdesign {

class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class Estimator { GLSE, OLSE };

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& s);

/// Multi-response regression model: m response blocks f_1..f_m over p design
/// variables, nominal error covariance V0 (m x m), neighbourhood radius
/// alpha and the estimator the design criterion targets.
struct ResponseModel {
  int num_vars = 0;                 // p
  std::vector<BasisVector> blocks;  // f_1..f_m
  SymMatrix v0;
  double alpha = 0.0;
  Estimator estimator = Estimator::GLSE;

  int num_responses() const { return static_cast<int>(blocks.size()); }
  int num_params() const {
    int q = 0;
    for (const auto& b : blocks) q += b.size();
    return q;
  }
  int block_offset(int j) const {
    int off = 0;
    for (int k = 0; k < j; ++k) off += blocks[k].size();
    return off;
  }
};

/// Checks the model invariants: V0 positive definite with dim m, alpha >= 0,
/// nonempty blocks, every referenced variable index <= num_vars.
/// Throws ModelError naming the violated invariant.
void validate_model(const ResponseModel& model);

/// The m x q matrix Z(x): row j carries f_j^T(x) in block j's columns,
/// all other entries exactly zero.
Matrix build_z(const ResponseModel& model, Eigen::Ref<const Vector> point);

}  // namespace mmdesign
