#pragma once

// Uniform Cartesian grids over [-extent, extent]^dim, scalar fields on them
// and second-order finite-difference stencils.
//
// Storage is row-major in (x1, x2, x3) with x3 fastest. Axes beyond `dim`
// have one point, zero extent and zero spacing, so the same flat index
// formula covers 1, 2 and 3 dimensions.

#include <array>
#include <cstddef>
#include <vector>

#include "nematowave/model.hpp"

namespace nematowave {

inline constexpr std::size_t kMinPoints = 8;

class GridSpec {
 public:
  GridSpec() = default;
  /// Same extent and point count on every used axis.
  GridSpec(int dim, double extent, std::size_t points);
  GridSpec(int dim, const std::array<double, 3>& extent, const std::array<std::size_t, 3>& points);

  int dim() const noexcept { return dim_; }
  double extent(int axis0) const noexcept { return extent_[axis0]; }
  std::size_t points(int axis0) const noexcept { return points_[axis0]; }
  double spacing(int axis0) const noexcept { return spacing_[axis0]; }
  const std::array<double, 3>& extents() const noexcept { return extent_; }
  const std::array<std::size_t, 3>& point_counts() const noexcept { return points_; }
  const std::array<double, 3>& spacings() const noexcept { return spacing_; }
  std::size_t stride(int axis0) const noexcept { return stride_[axis0]; }

  std::size_t size() const noexcept { return points_[0] * points_[1] * points_[2]; }
  /// Number of points in one x1 slab.
  std::size_t slab_size() const noexcept { return points_[1] * points_[2]; }
  double cell_volume() const noexcept;
  double min_spacing() const noexcept;

  std::size_t index(std::size_t i1, std::size_t i2 = 0, std::size_t i3 = 0) const noexcept {
    return (i1 * points_[1] + i2) * points_[2] + i3;
  }
  std::array<std::size_t, 3> multi_index(std::size_t flat) const noexcept;
  double coordinate(int axis0, std::size_t i) const noexcept {
    return axis0 < dim_ ? -extent_[axis0] + static_cast<double>(i) * spacing_[axis0] : 0.0;
  }
  /// Physical position of a flat index (unused axes are 0).
  std::array<double, 3> position(std::size_t flat) const noexcept;
  bool is_boundary(std::size_t flat) const noexcept;

  bool operator==(const GridSpec& o) const noexcept {
    return dim_ == o.dim_ && extent_ == o.extent_ && points_ == o.points_;
  }

 private:
  void init();

  int dim_ = 1;
  std::array<double, 3> extent_{1.0, 0.0, 0.0};
  std::array<std::size_t, 3> points_{kMinPoints, 1, 1};
  std::array<double, 3> spacing_{};
  std::array<std::size_t, 3> stride_{};
};

struct ScalarField {
  GridSpec spec;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& s, double fill = 0.0) : spec(s), values(s.size(), fill) {}

  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  std::size_t size() const noexcept { return values.size(); }
  double* data() noexcept { return values.data(); }
  const double* data() const noexcept { return values.data(); }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
};

struct State {
  double t = 0.0;
  ScalarField u;
  ScalarField v;

  State() = default;
  explicit State(const GridSpec& s, double t0 = 0.0) : t(t0), u(s), v(s) {}
  const GridSpec& spec() const noexcept { return u.spec; }
};

/// Samples f(x1, x2, x3) on the grid (unused coordinates are 0).
template <class F>
ScalarField sample(const GridSpec& spec, F&& f) {
  ScalarField out(spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto x = spec.position(k);
    out[k] = f(x[0], x[1], x[2]);
  }
  return out;
}

/// First derivative along axis (1-based). Centered in the interior,
/// second-order one-sided on the two boundary layers.
ScalarField partial(const ScalarField& f, int axis);

/// Second derivative d_a d_b (1-based axes). a == b uses the 3-point
/// stencil (4-point one-sided at the boundary); a != b is the tensor product
/// of the first-derivative stencils, evaluated in canonical axis order so that
/// (a, b) and (b, a) agree bitwise.
ScalarField second_partial(const ScalarField& f, int axis_a, int axis_b);

/// extent - (radius + t * sqrt(max constant)), minimised over the used axes.
double support_margin(const State& s, double radius, const ElasticConstants& c);

/// Largest |x| over nodes where |u| or |v| exceeds `threshold`; 0 when none.
double support_radius_of(const State& s, double threshold);

}  // namespace nematowave
