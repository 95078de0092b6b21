#pragma once

#include <vector>

#include "mmdesign/criterion.hpp"

namespace mmdesign {

/// First-order optimality certificate: d_i = tr(2 G^-1 g_i - H^-1 h_i) - q
/// over all N candidate points; the design is certified when
/// max_i d_i <= eta2.
struct Certificate {
  Vector d;
  double max_violation = 0.0;
  double eta2 = 0.0;
  bool pass = false;
  /// sum_i w_i d_i; identically 0 up to roundoff for any PD state.
  double weighted_sum = 0.0;
};

/// Evaluate the certificate at point weights (length N).
/// Throws SingularError when G(w) or H(w) is not PD.
Certificate certify(const DesignProblem& problem, const Vector& weights, double eta2);

struct SolverOptions;  // solver.hpp
struct SolveResult;

struct InvarianceReport {
  bool applicable = true;
  double max_weight_diff = 0.0;
  double loss_diff = 0.0;
  bool support_match = false;
};

/// Solve the problem with V0 and with Q V0 Q (Q = diag of +-1 signs) and
/// compare designs; Theorem-4 invariance predicts identical results.
InvarianceReport check_sign_flip(const ResponseModel& model, const DesignSpace& space,
                                 const std::vector<int>& orbit_axes, const SolverOptions& opts,
                                 const Vector& q_signs);

/// Solve on S and on the scaled space S_T and compare weights per index;
/// applicable only when every basis entry rescales as f_j(Tx) = Q_j f_j(x)
/// (pure products; truncated powers only with zero shift).
InvarianceReport check_scale(const ResponseModel& model, const DesignSpace& space,
                             const std::vector<int>& orbit_axes, const SolverOptions& opts,
                             const Vector& t);

/// Premise of the Theorem-3 check for one model.
bool scale_invariance_applicable(const ResponseModel& model);

}  // namespace mmdesign
