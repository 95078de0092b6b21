#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdesign/linalg.hpp"
#include "mmdesign/model.hpp"

namespace mmdesign {

class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// One design factor: an equally spaced grid on [lo, hi] or an explicit
/// strictly increasing level list (used for qualitative factors).
struct FactorSpec {
  enum class Kind { Grid, Levels };
  Kind kind = Kind::Grid;
  double lo = 0.0, hi = 1.0;
  int count = 2;
  std::vector<double> levels;

  static FactorSpec grid(double lo, double hi, int count);
  static FactorSpec level_set(std::vector<double> values);

  /// Materialized level values. Grid points are the affine combinations
  /// (lo*(n-k) + hi*k)/n, n = count-1, with exact endpoints; for lo == -hi
  /// this makes the set exactly closed under negation in floating point.
  std::vector<double> values() const;
};

/// Full Cartesian product of factor levels in lexicographic order
/// (factor 1 varies slowest). Point i corresponds to row i of points().
class DesignSpace {
 public:
  static DesignSpace build(std::vector<FactorSpec> factors, std::int64_t max_points = 1000000);

  int num_factors() const { return static_cast<int>(factors_.size()); }
  std::int64_t num_points() const { return points_.rows(); }
  const Matrix& points() const { return points_; }
  Vector point(std::int64_t i) const { return points_.row(i).transpose(); }
  const std::vector<FactorSpec>& factors() const { return factors_; }
  const std::vector<double>& factor_values(int r) const { return values_[r]; }

  /// Index of the point with the given per-factor level indices.
  std::int64_t index_of_levels(const std::vector<int>& level_idx) const;
  /// Level index of value v in factor r by exact comparison, or -1.
  int level_index(int r, double v) const;

 private:
  std::vector<FactorSpec> factors_;
  std::vector<std::vector<double>> values_;
  Matrix points_;  // N x p
};

/// Partition of point indices into orbits of the reflection group generated
/// by the chosen axes; weights get tied equal within each orbit.
struct OrbitStructure {
  std::vector<int> axes;                  // 1-based, empty = no tying
  std::vector<std::int32_t> orbit_of;     // point index -> orbit id
  std::vector<std::vector<std::int64_t>> members;  // orbit id -> ascending point indices

  std::int64_t count() const { return static_cast<std::int64_t>(members.size()); }
  std::int64_t representative(std::int64_t orbit) const { return members[orbit][0]; }
};

/// True iff negating coordinate `axis` (1-based) maps the space onto itself.
bool is_reflection_closed(const DesignSpace& space, int axis);

/// Axes r where the space is reflection-closed and every response block has a
/// constant sign pattern under T_r; on these axes a reflection-symmetric
/// optimal design exists.
std::vector<int> symmetry_axes(const DesignSpace& space, const ResponseModel& model);

/// Orbits under the group generated by the given reflections. Every axis must
/// be reflection-closed.
OrbitStructure build_orbits(const DesignSpace& space, const std::vector<int>& axes);

/// Coordinate-wise scaling x_r -> t_r * x_r, t_r > 0; index order preserved.
DesignSpace apply_scale(const DesignSpace& space, const Vector& t);

}  // namespace mmdesign
