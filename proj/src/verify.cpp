#include "mmdesign/verify.hpp"

#include <algorithm>
#include <cmath>

#include "mmdesign/solver.hpp"

namespace mmdesign {

Certificate certify(const DesignProblem& problem, const Vector& weights, double eta2) {
  const int q = problem.num_params();
  const CriterionState state = make_full_state(problem, weights);
  const Matrix ginv = solve_with_factor(state.chol_g, Matrix::Identity(q, q));
  const Matrix hinv = solve_with_factor(state.chol_h, Matrix::Identity(q, q));
  Certificate cert;
  cert.d = 2.0 * problem.trace_with(problem.point_g(), ginv) -
           problem.trace_with(problem.point_h(), hinv) - Vector::Constant(weights.size(), q);
  cert.max_violation = cert.d.maxCoeff();
  cert.eta2 = eta2;
  cert.pass = cert.max_violation <= eta2;
  cert.weighted_sum = weights.dot(cert.d);
  return cert;
}

namespace {

std::optional<OrbitStructure> orbits_for(const DesignSpace& space, const std::vector<int>& axes) {
  if (axes.empty()) return std::nullopt;
  return build_orbits(space, axes);
}

InvarianceReport compare_designs(const SolveResult& a, const SolveResult& b,
                                 double support_threshold) {
  InvarianceReport rep;
  rep.max_weight_diff = (a.weights - b.weights).cwiseAbs().maxCoeff();
  rep.loss_diff = b.loss - a.loss;
  rep.support_match = true;
  for (Eigen::Index i = 0; i < a.weights.size(); ++i) {
    if ((a.weights(i) >= support_threshold) != (b.weights(i) >= support_threshold)) {
      rep.support_match = false;
      break;
    }
  }
  return rep;
}

}  // namespace

InvarianceReport check_sign_flip(const ResponseModel& model, const DesignSpace& space,
                                 const std::vector<int>& orbit_axes, const SolverOptions& opts,
                                 const Vector& q_signs) {
  const int m = model.num_responses();
  if (q_signs.size() != m) throw ModelError("sign vector must have one entry per response");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (std::abs(q_signs(j)) != 1.0) throw ModelError("sign vector entries must be +-1");
  }
  ResponseModel flipped = model;
  Matrix v1 = model.v0.mat();
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) v1(r, c) = q_signs(r) * q_signs(c) * v1(r, c);
  }
  flipped.v0 = SymMatrix(v1);

  const DesignProblem base(model, space, orbits_for(space, orbit_axes));
  const DesignProblem flip(flipped, space, orbits_for(space, orbit_axes));
  const SolveResult ra = solve_dc(base, opts);
  const SolveResult rb = solve_dc(flip, opts);
  return compare_designs(ra, rb, opts.support_threshold);
}

bool scale_invariance_applicable(const ResponseModel& model) {
  for (const auto& block : model.blocks) {
    for (const auto& expr : block.exprs()) {
      for (const auto& f : expr.factors()) {
        if (f.kind == Factor::Kind::TruncPow && f.shift != 0.0) return false;
      }
    }
  }
  return true;
}

InvarianceReport check_scale(const ResponseModel& model, const DesignSpace& space,
                             const std::vector<int>& orbit_axes, const SolverOptions& opts,
                             const Vector& t) {
  InvarianceReport rep;
  if (!scale_invariance_applicable(model)) {
    rep.applicable = false;
    return rep;
  }
  const DesignSpace scaled = apply_scale(space, t);
  const DesignProblem base(model, space, orbits_for(space, orbit_axes));
  const DesignProblem transformed(model, scaled, orbits_for(scaled, orbit_axes));
  const SolveResult ra = solve_dc(base, opts);
  const SolveResult rb = solve_dc(transformed, opts);
  return compare_designs(ra, rb, opts.support_threshold);
}

}  // namespace mmdesign
