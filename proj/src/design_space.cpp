#include "mmdesign/design_space.hpp"

#include <algorithm>

namespace mmdesign {

FactorSpec FactorSpec::grid(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("grid factor needs count >= 2");
  if (!(lo < hi)) throw std::invalid_argument("grid factor needs lo < hi");
  FactorSpec f;
  f.kind = Kind::Grid;
  f.lo = lo;
  f.hi = hi;
  f.count = count;
  return f;
}

FactorSpec FactorSpec::level_set(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("level factor needs >= 1 value");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k - 1] < values[k])) {
      throw std::invalid_argument("level factor values must be strictly increasing");
    }
  }
  FactorSpec f;
  f.kind = Kind::Levels;
  f.levels = std::move(values);
  f.count = static_cast<int>(f.levels.size());
  return f;
}

std::vector<double> FactorSpec::values() const {
  if (kind == Kind::Levels) return levels;
  std::vector<double> v(count);
  const int n = count - 1;
  v[0] = lo;
  v[n] = hi;
  for (int k = 1; k < n; ++k) v[k] = (lo * (n - k) + hi * k) / n;
  return v;
}

DesignSpace DesignSpace::build(std::vector<FactorSpec> factors, std::int64_t max_points) {
  if (factors.empty()) throw std::invalid_argument("design space needs >= 1 factor");
  DesignSpace s;
  s.factors_ = std::move(factors);
  std::int64_t n = 1;
  for (const auto& f : s.factors_) {
    s.values_.push_back(f.values());
    n *= static_cast<std::int64_t>(s.values_.back().size());
    if (n > max_points) {
      throw CapacityError("design space exceeds the cap of " + std::to_string(max_points) +
                          " points");
    }
  }
  const int p = s.num_factors();
  s.points_.resize(n, p);
  std::vector<int> idx(p, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int r = 0; r < p; ++r) s.points_(i, r) = s.values_[r][idx[r]];
    for (int r = p - 1; r >= 0; --r) {
      if (++idx[r] < static_cast<int>(s.values_[r].size())) break;
      idx[r] = 0;
    }
  }
  return s;
}

std::int64_t DesignSpace::index_of_levels(const std::vector<int>& level_idx) const {
  std::int64_t i = 0;
  for (int r = 0; r < num_factors(); ++r) {
    i = i * static_cast<std::int64_t>(values_[r].size()) + level_idx[r];
  }
  return i;
}

int DesignSpace::level_index(int r, double v) const {
  if (v == 0.0) v = 0.0;  // normalize -0
  const auto& vals = values_[r];
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] == v) return static_cast<int>(k);
  }
  return -1;
}

bool is_reflection_closed(const DesignSpace& space, int axis) {
  const auto& vals = space.factor_values(axis - 1);
  for (double v : vals) {
    if (space.level_index(axis - 1, -v) < 0) return false;
  }
  return true;
}

std::vector<int> symmetry_axes(const DesignSpace& space, const ResponseModel& model) {
  std::vector<int> axes;
  for (int r = 1; r <= space.num_factors(); ++r) {
    if (!is_reflection_closed(space, r)) continue;
    bool all_blocks = true;
    for (const auto& block : model.blocks) {
      if (!reflection_signature(block, r, space.points())) {
        all_blocks = false;
        break;
      }
    }
    if (all_blocks) axes.push_back(r);
  }
  return axes;
}

OrbitStructure build_orbits(const DesignSpace& space, const std::vector<int>& axes) {
  for (int r : axes) {
    if (!is_reflection_closed(space, r)) {
      throw std::invalid_argument("axis " + std::to_string(r) + " is not reflection-closed");
    }
  }
  const std::int64_t n = space.num_points();
  const int p = space.num_factors();
  OrbitStructure orbits;
  orbits.axes = axes;
  orbits.orbit_of.assign(n, -1);
  const std::size_t na = axes.size();
  std::vector<int> level_idx(p);
  for (std::int64_t i = 0; i < n; ++i) {
    if (orbits.orbit_of[i] >= 0) continue;
    const auto id = static_cast<std::int32_t>(orbits.members.size());
    std::vector<std::int64_t> member_set;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << na); ++mask) {
      for (int r = 0; r < p; ++r) level_idx[r] = space.level_index(r, space.points()(i, r));
      for (std::size_t a = 0; a < na; ++a) {
        if (mask & (std::uint64_t{1} << a)) {
          const int r = axes[a] - 1;
          level_idx[r] = space.level_index(r, -space.points()(i, r));
        }
      }
      member_set.push_back(space.index_of_levels(level_idx));
    }
    std::sort(member_set.begin(), member_set.end());
    member_set.erase(std::unique(member_set.begin(), member_set.end()), member_set.end());
    for (std::int64_t j : member_set) orbits.orbit_of[j] = id;
    orbits.members.push_back(std::move(member_set));
  }
  return orbits;
}

DesignSpace apply_scale(const DesignSpace& space, const Vector& t) {
  if (t.size() != space.num_factors()) {
    throw std::invalid_argument("scale vector length must equal the factor count");
  }
  if ((t.array() <= 0.0).any()) throw std::invalid_argument("scale factors must be > 0");
  std::vector<FactorSpec> scaled;
  for (int r = 0; r < space.num_factors(); ++r) {
    std::vector<double> vals = space.factor_values(r);
    for (double& v : vals) v *= t(r);
    scaled.push_back(FactorSpec::level_set(std::move(vals)));
  }
  return DesignSpace::build(std::move(scaled), space.num_points());
}

}  // namespace mmdesign
