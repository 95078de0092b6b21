#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmdesign/design_space.hpp"
#include "mmdesign/model.hpp"

namespace mmdesign {

/// Per-point information matrices (Theorem-5 case table):
///   GLSE: g = Z' V0^-1 Z,  h = Z' V0^-1 (V0 + alpha I) V0^-1 Z
///   OLSE: g = Z' Z,        h = Z' (V0 + alpha I) Z
struct PointMatrices {
  SymMatrix g;
  SymMatrix h;
  std::int64_t index;
};

PointMatrices point_matrices(const ResponseModel& model, const DesignSpace& space,
                             std::int64_t i);

/// A fully assembled minimax design problem: the per-point matrices are
/// precomputed once (flattened, column i = vec(g_i)) together with the
/// solver-facing "atoms" — points, or orbit averages when weights are tied.
/// Immutable after construction; shared read-only across threads.
class DesignProblem {
 public:
  DesignProblem(ResponseModel model, DesignSpace space,
                std::optional<OrbitStructure> orbits = std::nullopt, int threads = 1);

  const ResponseModel& model() const { return model_; }
  const DesignSpace& space() const { return space_; }
  const std::optional<OrbitStructure>& orbits() const { return orbits_; }

  int num_params() const { return q_; }
  std::int64_t num_points() const { return space_.num_points(); }
  std::int64_t num_atoms() const { return atom_g_.cols(); }
  bool tied() const { return orbits_.has_value(); }

  /// q^2 x N flattened per-point matrices.
  const Matrix& point_g() const { return point_g_; }
  const Matrix& point_h() const { return point_h_; }
  /// q^2 x K flattened atom matrices (orbit means, or the point matrices).
  const Matrix& atom_g() const { return atom_g_; }
  const Matrix& atom_h() const { return atom_h_; }
  /// r x q factor Y with atom_g[k] = Y' Y; r = m * orbit size.
  const Matrix& atom_g_factor(std::int64_t k) const { return atom_g_factor_[k]; }

  /// Expand atom weights to a length-N point weight vector (equal split
  /// within each orbit); identity when atoms are points.
  Vector expand(const Vector& atom_weights) const;

  /// Sum w_k * M_k over columns of a flattened cache; indices with
  /// w_k < 1e-16 are skipped.
  Matrix assemble(const Matrix& flat, const Vector& w) const;

  /// For every column k: tr(M_k * S) = vec(M_k) . vec(S), S symmetric.
  Vector trace_with(const Matrix& flat, const Matrix& sym) const;

 private:
  ResponseModel model_;
  DesignSpace space_;
  std::optional<OrbitStructure> orbits_;
  int q_ = 0;
  Matrix point_g_, point_h_;  // q^2 x N
  Matrix atom_g_, atom_h_;    // q^2 x K
  std::vector<Matrix> atom_g_factor_;
};

/// Aggregated matrices G(w), H(w) with their Cholesky factors.
struct CriterionState {
  SymMatrix g_w;
  SymMatrix h_w;
  Matrix chol_g;
  Matrix chol_h;
};

/// Assemble and factor G(w), H(w) from atom weights.
/// Throws SingularError when either matrix is not PD.
CriterionState make_state(const DesignProblem& problem, const Vector& atom_weights);

/// Same, but from full point weights (length N) via the per-point caches.
CriterionState make_full_state(const DesignProblem& problem, const Vector& point_weights);

/// The minimax loss -2 log det G(w) + log det H(w).
double loss(const CriterionState& state);

/// Gradient of g(w) = -2 log det G(w): component k = -2 tr(G^-1 g_k),
/// over atoms.
Vector grad_g(const DesignProblem& problem, const CriterionState& state);

/// Gradient of h(w) = -log det H(w): component k = -tr(H^-1 h_k), over atoms.
Vector grad_h(const DesignProblem& problem, const CriterionState& state);

/// Gradient of the convex majorizer g(w) - v(w, w0) at the state's weights,
/// given the anchor gradient of h at w0.
Vector surrogate_grad(const DesignProblem& problem, const CriterionState& state,
                      const Vector& anchor_grad_h);

}  // namespace mmdesign
