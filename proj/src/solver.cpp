#include "mmdesign/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mmdesign {

namespace {

// One-dimensional restriction of F(w) = -2 logdet G(w) - a.w along a
// Frank-Wolfe or away direction, expressed through the rank factor
// K = Y G^-1 Y' of the moved atom (matrix determinant lemma). All
// evaluations stay in the atom's row dimension, which keeps the derivative
// numerically meaningful arbitrarily close to the PD boundary.
struct Restriction {
  const Matrix& k;  // r x r PSD
  int q;
  double lin;   // derivative of the linear part, constant in the step
  bool toward;  // true: G(t) = (1-t) G + t A; false: G(t) = (1+t) G - t A

  // derivative of the restriction at step t; +inf once past the PD boundary
  double slope(double t) const {
    const int r = static_cast<int>(k.rows());
    const double denom = toward ? 1.0 - t : 1.0 + t;
    const double sigma = t / denom;
    const Matrix m = toward ? Matrix(Matrix::Identity(r, r) + sigma * k)
                            : Matrix(Matrix::Identity(r, r) - sigma * k);
    auto l = try_cholesky(m);
    if (!l) return std::numeric_limits<double>::infinity();
    const double tr = solve_with_factor(*l, k).trace();
    const double dlogdet = toward ? -q / denom + tr / (denom * denom)
                                  : q / denom - tr / (denom * denom);
    return -2.0 * dlogdet + lin;
  }

  // F(t) - F(0); +inf once past the PD boundary
  double delta(double t) const {
    const int r = static_cast<int>(k.rows());
    const double denom = toward ? 1.0 - t : 1.0 + t;
    const double sigma = t / denom;
    const Matrix m = toward ? Matrix(Matrix::Identity(r, r) + sigma * k)
                            : Matrix(Matrix::Identity(r, r) - sigma * k);
    auto l = try_cholesky(m);
    if (!l) return std::numeric_limits<double>::infinity();
    const double logdet = std::log1p(toward ? -t : t) * q + log_det_from_factor(*l);
    return -2.0 * logdet + t * lin;
  }
};

// Largest step in [0, hi] with nonpositive slope, by derivative bisection to
// 1e-12 interval width. slope(0) < 0 is the caller's responsibility.
double line_search(const Restriction& f, double hi) {
  if (f.slope(hi) <= 0.0) return hi;
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (f.slope(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

}  // namespace

InnerResult solve_inner(const DesignProblem& problem, const Vector& anchor,
                        const Vector& anchor_grad_h, double tol, int max_inner) {
  const std::int64_t n_atoms = problem.num_atoms();
  const int q = problem.num_params();
  const Vector& a = anchor_grad_h;

  InnerResult res;
  res.weights = anchor;
  Vector& w = res.weights;
  Matrix g = problem.assemble(problem.atom_g(), w);
  Vector grad(n_atoms);
  int stalls = 0;

  for (res.iterations = 0; res.iterations < max_inner; ++res.iterations) {
    auto chol = try_cholesky(g);
    if (!chol) {
      g = problem.assemble(problem.atom_g(), w);
      chol = try_cholesky(g);
      if (!chol) break;  // non-PD even after exact reassembly: give up
    }
    const Matrix ginv = solve_with_factor(*chol, Matrix::Identity(q, q));
    grad = -2.0 * problem.trace_with(problem.atom_g(), ginv) - a;

    Eigen::Index s = 0;
    grad.minCoeff(&s);
    res.gap = w.dot(grad) - grad(s);
    if (res.gap <= tol) {
      res.converged = true;
      break;
    }

    Eigen::Index v = -1;
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n_atoms; ++k) {
      if (w(k) > 0.0 && grad(k) > worst) {
        worst = grad(k);
        v = k;
      }
    }
    const double away_gap = worst - w.dot(grad);

    double step = 0.0;
    bool progressed = false;
    if (v < 0 || res.gap >= away_gap) {
      // toward vertex s
      const Matrix& y = problem.atom_g_factor(s);
      const Matrix k_mat = y * solve_with_factor(*chol, y.transpose());
      Restriction f{k_mat, q, w.dot(a) - a(s), true};
      step = line_search(f, 1.0 - 1e-9);
      for (int halvings = 0; step > 0.0 && f.delta(step) > 0.0 && halvings < 60; ++halvings) {
        step *= 0.5;
      }
      if (step > 0.0 && f.delta(step) <= 0.0) {
        w *= 1.0 - step;
        w(s) += step;
        g = (1.0 - step) * g +
            step * Eigen::Map<const Matrix>(problem.atom_g().col(s).data(), q, q);
        progressed = true;
      }
    } else {
      // away from vertex v
      const Matrix& y = problem.atom_g_factor(v);
      const Matrix k_mat = y * solve_with_factor(*chol, y.transpose());
      Restriction f{k_mat, q, a(v) - w.dot(a), false};
      const double step_max = w(v) < 1.0 ? std::min(w(v) / (1.0 - w(v)), 1e12) : 1e12;
      double hi = step_max;
      for (int halvings = 0; !std::isfinite(f.slope(hi)) && halvings < 60; ++halvings) {
        hi *= 0.5;  // Cholesky-failure backoff: stay strictly inside the PD region
      }
      if (std::isfinite(f.slope(hi))) {
        step = line_search(f, hi);
        for (int halvings = 0; step > 0.0 && f.delta(step) > 0.0 && halvings < 60; ++halvings) {
          step *= 0.5;
        }
        if (step > 0.0 && f.delta(step) <= 0.0) {
          if (step >= step_max * (1.0 - 1e-14)) {
            w *= 1.0 + step;
            w(v) = 0.0;  // drop step: the away vertex leaves the support
          } else {
            w *= 1.0 + step;
            w(v) -= step;
          }
          g = (1.0 + step) * g -
              step * Eigen::Map<const Matrix>(problem.atom_g().col(v).data(), q, q);
          progressed = true;
        }
      }
    }

    if (!progressed) {
      if (++stalls > 3) break;
      continue;
    }
    stalls = 0;
    if ((res.iterations + 1) % 256 == 0) g = problem.assemble(problem.atom_g(), w);
  }

  w /= w.sum();
  return res;
}

Vector init_weights(const DesignProblem& problem, const SolverOptions& opts) {
  const std::int64_t k = problem.num_atoms();
  const Vector uniform = Vector::Constant(k, 1.0 / static_cast<double>(k));
  try {
    make_state(problem, uniform);
  } catch (const SingularError&) {
    throw InfeasibleModel(
        "the information matrix is singular even at uniform weights; "
        "the model is not identifiable on this design space");
  }
  return solve_inner(problem, uniform, Vector::Zero(k), opts.inner_gap_tol, opts.max_inner)
      .weights;
}

namespace {

struct DcaRun {
  Vector atom_w;
  bool converged = false;
  std::vector<int> inner_counts;
  std::vector<double> losses;
};

DcaRun run_dca(const DesignProblem& problem, const SolverOptions& opts, const Vector& w0,
               bool init_converged) {
  DcaRun run;
  run.atom_w = w0;
  bool inner_ok = init_converged;
  run.losses.push_back(loss(make_state(problem, run.atom_w)));
  bool outer_done = false;
  int l = 0;
  for (; l < opts.max_outer && !outer_done; ++l) {
    const CriterionState state = make_state(problem, run.atom_w);
    const Vector anchor_grad = grad_h(problem, state);
    const InnerResult inner =
        solve_inner(problem, run.atom_w, anchor_grad, opts.inner_gap_tol, opts.max_inner);
    inner_ok = inner_ok && inner.converged;
    const double delta = (inner.weights - run.atom_w).norm();
    run.atom_w = inner.weights;
    run.inner_counts.push_back(inner.iterations);
    run.losses.push_back(loss(make_state(problem, run.atom_w)));
    outer_done = delta < opts.eta1;
  }
  run.converged = outer_done && inner_ok;
  return run;
}

}  // namespace

SolveResult solve_dc(const DesignProblem& problem, const SolverOptions& opts, double eta2) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::int64_t k = problem.num_atoms();

  const Vector uniform = Vector::Constant(k, 1.0 / static_cast<double>(k));
  try {
    make_state(problem, uniform);
  } catch (const SingularError&) {
    throw InfeasibleModel(
        "the information matrix is singular even at uniform weights; "
        "the model is not identifiable on this design space");
  }
  const InnerResult boot = solve_inner(problem, uniform, Vector::Zero(k), opts.inner_gap_tol,
                                       opts.max_inner);
  DcaRun run = run_dca(problem, opts, boot.weights, boot.converged);

  SolveResult res;
  res.atom_weights = run.atom_w;
  res.weights = problem.expand(run.atom_w);
  res.outer_iterations = static_cast<int>(run.inner_counts.size());
  res.inner_iteration_counts.reserve(run.inner_counts.size() + 1);
  res.inner_iteration_counts.push_back(boot.iterations);
  res.inner_iteration_counts.insert(res.inner_iteration_counts.end(), run.inner_counts.begin(),
                                    run.inner_counts.end());
  res.outer_losses = run.losses;
  res.converged = run.converged;
  res.certificate = certify(problem, res.weights, eta2);
  res.loss = loss(make_full_state(problem, res.weights));

  for (int j = 1; j <= opts.multi_start; ++j) {
    Vector start = Vector::Zero(k);
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < k; i += j + 1) {
      start(i) = 1.0;
      ++hits;
    }
    start /= static_cast<double>(hits);
    try {
      make_state(problem, start);
    } catch (const SingularError&) {
      continue;  // this deterministic start is infeasible; skip it
    }
    const InnerResult b = solve_inner(problem, start, Vector::Zero(k), opts.inner_gap_tol,
                                      opts.max_inner);
    const DcaRun alt = run_dca(problem, opts, b.weights, b.converged);
    res.multi_start_losses.push_back(loss(make_full_state(problem, problem.expand(alt.atom_w))));
  }

  res.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace mmdesign
