#include "mmdesign/criterion.hpp"

#include <cmath>
#include <thread>

namespace mmdesign {

namespace {

// Row factors C with g_i = (Cg Z_i)'(Cg Z_i) and h_i = (Ch Z_i)'(Ch Z_i).
struct EstimatorTransforms {
  std::optional<Matrix> cg;  // nullopt = identity (OLSE)
  Matrix ch;
};

EstimatorTransforms make_transforms(const ResponseModel& model) {
  const int m = model.num_responses();
  const Matrix& v0 = model.v0.mat();
  const Matrix v_plug = v0 + model.alpha * Matrix::Identity(m, m);
  EstimatorTransforms t;
  if (model.estimator == Estimator::GLSE) {
    const Matrix l = cholesky(model.v0);
    t.cg = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(m, m));
    // M = V0^-1 (V0 + alpha I) V0^-1, assembled via two PD solves
    const Matrix tmp = solve_pd(v0, v_plug);
    const Matrix mh = solve_pd(v0, tmp.transpose());
    t.ch = cholesky(SymMatrix(mh)).transpose();
  } else {
    t.ch = cholesky(SymMatrix(v_plug)).transpose();
  }
  return t;
}

struct PointFactors {
  Matrix yg;  // m x q
  Matrix yh;
};

PointFactors factors_at(const ResponseModel& model, const EstimatorTransforms& t,
                        Eigen::Ref<const Vector> point) {
  const Matrix z = build_z(model, point);
  PointFactors f;
  f.yg = t.cg ? (*t.cg * z).eval() : z;
  f.yh = t.ch * z;
  return f;
}

}  // namespace

PointMatrices point_matrices(const ResponseModel& model, const DesignSpace& space,
                             std::int64_t i) {
  const EstimatorTransforms t = make_transforms(model);
  const PointFactors f = factors_at(model, t, space.point(i));
  return PointMatrices{SymMatrix(f.yg.transpose() * f.yg), SymMatrix(f.yh.transpose() * f.yh), i};
}

DesignProblem::DesignProblem(ResponseModel model, DesignSpace space,
                             std::optional<OrbitStructure> orbits, int threads)
    : model_(std::move(model)), space_(std::move(space)), orbits_(std::move(orbits)) {
  validate_model(model_);
  if (model_.num_vars != space_.num_factors()) {
    throw ModelError("model has " + std::to_string(model_.num_vars) + " variables but the space " +
                     std::to_string(space_.num_factors()) + " factors");
  }
  q_ = model_.num_params();
  const std::int64_t n = space_.num_points();
  const int m = model_.num_responses();
  const EstimatorTransforms t = make_transforms(model_);

  point_g_.resize(static_cast<std::int64_t>(q_) * q_, n);
  point_h_.resize(static_cast<std::int64_t>(q_) * q_, n);
  std::vector<Matrix> yg(n);

  auto fill_range = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const PointFactors f = factors_at(model_, t, space_.point(i));
      Eigen::Map<Matrix>(point_g_.col(i).data(), q_, q_) = f.yg.transpose() * f.yg;
      Eigen::Map<Matrix>(point_h_.col(i).data(), q_, q_) = f.yh.transpose() * f.yh;
      yg[i] = f.yg;
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (workers == 1) {
    fill_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = w * chunk;
      const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
      if (lo < hi) pool.emplace_back(fill_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  if (!orbits_) {
    atom_g_ = point_g_;
    atom_h_ = point_h_;
    atom_g_factor_.resize(n);
    for (std::int64_t i = 0; i < n; ++i) atom_g_factor_[i] = std::move(yg[i]);
    return;
  }

  const std::int64_t k = orbits_->count();
  atom_g_.resize(static_cast<std::int64_t>(q_) * q_, k);
  atom_h_.resize(static_cast<std::int64_t>(q_) * q_, k);
  atom_g_factor_.resize(k);
  for (std::int64_t o = 0; o < k; ++o) {
    const auto& mem = orbits_->members[o];
    const double scale = 1.0 / std::sqrt(static_cast<double>(mem.size()));
    Matrix stack(static_cast<std::int64_t>(m) * mem.size(), q_);
    atom_h_.col(o).setZero();
    for (std::size_t j = 0; j < mem.size(); ++j) {
      stack.middleRows(static_cast<std::int64_t>(j) * m, m) = yg[mem[j]] * scale;
      atom_h_.col(o) += point_h_.col(mem[j]);
    }
    atom_h_.col(o) /= static_cast<double>(mem.size());
    Eigen::Map<Matrix>(atom_g_.col(o).data(), q_, q_) = stack.transpose() * stack;
    atom_g_factor_[o] = std::move(stack);
  }
}

Vector DesignProblem::expand(const Vector& atom_weights) const {
  if (!orbits_) return atom_weights;
  Vector w = Vector::Zero(space_.num_points());
  for (std::int64_t o = 0; o < orbits_->count(); ++o) {
    const auto& mem = orbits_->members[o];
    const double share = atom_weights(o) / static_cast<double>(mem.size());
    for (std::int64_t i : mem) w(i) = share;
  }
  return w;
}

Matrix DesignProblem::assemble(const Matrix& flat, const Vector& w) const {
  Vector acc = Vector::Zero(flat.rows());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) >= 1e-16) acc += w(k) * flat.col(k);
  }
  return Eigen::Map<const Matrix>(acc.data(), q_, q_);
}

Vector DesignProblem::trace_with(const Matrix& flat, const Matrix& sym) const {
  return flat.transpose() * Eigen::Map<const Vector>(sym.data(), sym.size());
}

namespace {

CriterionState state_from(Matrix g_raw, Matrix h_raw) {
  SymMatrix g(std::move(g_raw));
  SymMatrix h(std::move(h_raw));
  auto lg = try_cholesky(g);
  if (!lg) throw SingularError("G(w) is singular");
  auto lh = try_cholesky(h);
  if (!lh) throw SingularError("H(w) is singular");
  return CriterionState{std::move(g), std::move(h), *std::move(lg), *std::move(lh)};
}

}  // namespace

CriterionState make_state(const DesignProblem& problem, const Vector& atom_weights) {
  return state_from(problem.assemble(problem.atom_g(), atom_weights),
                    problem.assemble(problem.atom_h(), atom_weights));
}

CriterionState make_full_state(const DesignProblem& problem, const Vector& point_weights) {
  return state_from(problem.assemble(problem.point_g(), point_weights),
                    problem.assemble(problem.point_h(), point_weights));
}

double loss(const CriterionState& state) {
  return -2.0 * log_det_from_factor(state.chol_g) + log_det_from_factor(state.chol_h);
}

Vector grad_g(const DesignProblem& problem, const CriterionState& state) {
  const int q = problem.num_params();
  const Matrix ginv = solve_with_factor(state.chol_g, Matrix::Identity(q, q));
  return -2.0 * problem.trace_with(problem.atom_g(), ginv);
}

Vector grad_h(const DesignProblem& problem, const CriterionState& state) {
  const int q = problem.num_params();
  const Matrix hinv = solve_with_factor(state.chol_h, Matrix::Identity(q, q));
  return -problem.trace_with(problem.atom_h(), hinv);
}

Vector surrogate_grad(const DesignProblem& problem, const CriterionState& state,
                      const Vector& anchor_grad_h) {
  return grad_g(problem, state) - anchor_grad_h;
}

}  // namespace mmdesign
