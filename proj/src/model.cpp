#include "mmdesign/model.hpp"

namespace mmdesign {

std::string to_string(Estimator e) { return e == Estimator::GLSE ? "glse" : "olse"; }

Estimator estimator_from_string(const std::string& s) {
  if (s == "glse" || s == "GLSE") return Estimator::GLSE;
  if (s == "olse" || s == "OLSE") return Estimator::OLSE;
  throw ModelError("unknown estimator '" + s + "' (expected glse or olse)");
}

void validate_model(const ResponseModel& model) {
  if (model.num_vars < 1) throw ModelError("model needs >= 1 design variable");
  if (model.blocks.empty()) throw ModelError("model needs >= 1 response block");
  if (model.v0.dim() != model.num_responses()) {
    throw ModelError("v0 must be m x m with m = " + std::to_string(model.num_responses()) +
                     " response blocks, got dim " + std::to_string(model.v0.dim()));
  }
  if (!(model.alpha >= 0.0)) throw ModelError("alpha must be >= 0");
  if (!try_cholesky(model.v0)) throw ModelError("v0 is not positive definite");
  for (int j = 0; j < model.num_responses(); ++j) {
    const int mv = model.blocks[j].max_var();
    if (mv > model.num_vars) {
      throw ModelError("response " + std::to_string(j + 1) + " references x" + std::to_string(mv) +
                       " but the model has only " + std::to_string(model.num_vars) + " variables");
    }
  }
}

Matrix build_z(const ResponseModel& model, Eigen::Ref<const Vector> point) {
  const int m = model.num_responses();
  const int q = model.num_params();
  Matrix z = Matrix::Zero(m, q);
  int off = 0;
  for (int j = 0; j < m; ++j) {
    const int qj = model.blocks[j].size();
    z.row(j).segment(off, qj) = eval_basis(model.blocks[j], point).transpose();
    off += qj;
  }
  return z;
}

}  // namespace mmdesign
