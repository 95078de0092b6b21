#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace mmdesign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when a matrix that must be positive definite fails its Cholesky
/// factorization (pivot at or below the scale-relative floor).
class SingularError : public std::runtime_error {
 public:
  explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// Relative pivot floor: a pivot <= kPivotFloorRel * max diagonal entry is
/// treated as zero and the matrix declared singular.
inline constexpr double kPivotFloorRel = 1e-12;

/// Dense symmetric matrix. Symmetrized on construction as (M + M^T)/2, so
/// entries(i,j) == entries(j,i) holds exactly afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1) {
      throw std::invalid_argument("SymMatrix: matrix must be square with dim >= 1");
    }
    m_ = ((m_ + m_.transpose()) / 2.0).eval();
  }

  static SymMatrix identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Cholesky factor L (lower triangular, L L^T = S) of a symmetric matrix,
/// or nullopt when some pivot falls at or below the pivot floor.
template <typename Derived>
std::optional<Matrix> try_cholesky(const Eigen::MatrixBase<Derived>& s) {
  const Eigen::Index n = s.rows();
  Matrix l = Matrix::Zero(n, n);
  const double floor = kPivotFloorRel * s.diagonal().maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = s(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor)) return std::nullopt;
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    if (j + 1 < n) {
      l.col(j).tail(n - j - 1) =
          (s.col(j).tail(n - j - 1) -
           l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose()) /
          ljj;
    }
  }
  return l;
}

inline std::optional<Matrix> try_cholesky(const SymMatrix& s) { return try_cholesky(s.mat()); }

template <typename Derived>
Matrix cholesky(const Eigen::MatrixBase<Derived>& s) {
  auto l = try_cholesky(s);
  if (!l) throw SingularError("cholesky: matrix is singular to working precision");
  return *std::move(l);
}

inline Matrix cholesky(const SymMatrix& s) { return cholesky(s.mat()); }

/// log det S for positive definite S, via 2 * sum log diag(chol(S)).
inline double log_det_from_factor(const Matrix& l) {
  return 2.0 * l.diagonal().array().log().sum();
}

template <typename Derived>
double log_det_pd(const Eigen::MatrixBase<Derived>& s) {
  return log_det_from_factor(cholesky(s));
}

inline double log_det_pd(const SymMatrix& s) { return log_det_pd(s.mat()); }

/// Solve S X = B given the Cholesky factor of S.
template <typename Derived>
Matrix solve_with_factor(const Matrix& l, const Eigen::MatrixBase<Derived>& b) {
  Matrix x = l.template triangularView<Eigen::Lower>().solve(b.derived());
  l.transpose().template triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

/// Solve S X = B for positive definite S; B may have any column count.
template <typename DerivedS, typename DerivedB>
Matrix solve_pd(const Eigen::MatrixBase<DerivedS>& s, const Eigen::MatrixBase<DerivedB>& b) {
  return solve_with_factor(cholesky(s), b);
}

inline Matrix solve_pd(const SymMatrix& s, const Matrix& b) { return solve_pd(s.mat(), b); }

/// tr(A B) for symmetric A, B of equal dimension, computed as the entrywise
/// sum without forming the product.
template <typename DerivedA, typename DerivedB>
double trace_prod(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.derived().cwiseProduct(b.derived().transpose()).sum();
}

inline double trace_prod(const SymMatrix& a, const SymMatrix& b) {
  return trace_prod(a.mat(), b.mat());
}

}  // namespace mmdesign
