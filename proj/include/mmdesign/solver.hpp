#pragma once

#include <stdexcept>
#include <vector>

#include "mmdesign/criterion.hpp"
#include "mmdesign/verify.hpp"

namespace mmdesign {

class InfeasibleModel : public std::runtime_error {
 public:
  explicit InfeasibleModel(const std::string& what) : std::runtime_error(what) {}
};

struct SolverOptions {
  double eta1 = 1e-5;              // outer stop on ||w_l - w_{l-1}||_2
  double inner_gap_tol = 1e-7;     // Frank-Wolfe duality gap per subproblem
  int max_outer = 200;
  int max_inner = 50000;
  double support_threshold = 1e-5;  // display/support cut, not a solver knob
  bool seedless = true;             // no randomness anywhere in the pipeline
  int multi_start = 0;              // extra deterministic starts (sensitivity)
};

struct InnerResult {
  Vector weights;   // atom space
  int iterations = 0;
  double gap = 0.0;
  bool converged = false;
};

struct SolveResult {
  Vector weights;       // length N, expanded from atoms
  Vector atom_weights;  // as solved (equals weights when no tying)
  double loss = 0.0;
  int outer_iterations = 0;
  std::vector<int> inner_iteration_counts;  // entry 0 = initialization solve
  std::vector<double> outer_losses;         // loss trace, entry 0 = at init
  Certificate certificate;
  double wall_time_seconds = 0.0;
  bool converged = false;
  std::vector<double> multi_start_losses;  // surfaced, never adjudicated
};

/// Initial weights: minimize g(w) alone over the simplex from uniform
/// weights (convex bootstrap). Guarantees G(w0) is nonsingular whenever the
/// model is identifiable on the space; throws InfeasibleModel otherwise.
Vector init_weights(const DesignProblem& problem, const SolverOptions& opts);

/// One convex subproblem: minimize g(w) - <anchor_grad_h, w> over the simplex
/// by conditional gradient with away steps, warm-started at `anchor`.
/// Stops at duality gap <= tol or max_inner iterations (best iterate, flagged).
InnerResult solve_inner(const DesignProblem& problem, const Vector& anchor,
                        const Vector& anchor_grad_h, double tol, int max_inner);

/// Full DC iteration: repeat inner solves with refreshed linearization until
/// the weight change drops below eta1. Monotone in the loss by construction.
SolveResult solve_dc(const DesignProblem& problem, const SolverOptions& opts, double eta2 = 1e-3);

}  // namespace mmdesign
