#include "nematowave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nematowave/errors.hpp"

namespace nematowave {

GridSpec::GridSpec(int dim, double extent, std::size_t points) : dim_(dim) {
  for (int a = 0; a < 3; ++a) {
    extent_[a] = a < dim ? extent : 0.0;
    points_[a] = a < dim ? points : 1;
  }
  init();
}

GridSpec::GridSpec(int dim, const std::array<double, 3>& extent, const std::array<std::size_t, 3>& points)
    : dim_(dim) {
  for (int a = 0; a < 3; ++a) {
    extent_[a] = a < dim ? extent[a] : 0.0;
    points_[a] = a < dim ? points[a] : 1;
  }
  init();
}

void GridSpec::init() {
  if (dim_ < 1 || dim_ > 3) throw PreconditionError("grid dimension must be 1, 2 or 3");
  for (int a = 0; a < dim_; ++a) {
    if (points_[a] < kMinPoints) {
      std::ostringstream os;
      os << "grid axis " << a + 1 << " needs at least " << kMinPoints << " points (got " << points_[a] << ")";
      throw PreconditionError(os.str());
    }
    if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a])) {
      std::ostringstream os;
      os << "grid axis " << a + 1 << " extent must be positive (got " << extent_[a] << ")";
      throw PreconditionError(os.str());
    }
    spacing_[a] = 2.0 * extent_[a] / static_cast<double>(points_[a] - 1);
  }
  for (int a = dim_; a < 3; ++a) spacing_[a] = 0.0;
  stride_[2] = 1;
  stride_[1] = points_[2];
  stride_[0] = points_[1] * points_[2];
}

double GridSpec::cell_volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

double GridSpec::min_spacing() const noexcept {
  double h = spacing_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

std::array<std::size_t, 3> GridSpec::multi_index(std::size_t flat) const noexcept {
  const std::size_t i3 = flat % points_[2];
  const std::size_t rest = flat / points_[2];
  return {rest / points_[1], rest % points_[1], i3};
}

std::array<double, 3> GridSpec::position(std::size_t flat) const noexcept {
  const auto m = multi_index(flat);
  return {coordinate(0, m[0]), coordinate(1, m[1]), coordinate(2, m[2])};
}

bool GridSpec::is_boundary(std::size_t flat) const noexcept {
  const auto m = multi_index(flat);
  for (int a = 0; a < dim_; ++a)
    if (m[a] == 0 || m[a] + 1 == points_[a]) return true;
  return false;
}

bool ScalarField::all_finite() const noexcept {
  for (double x : values)
    if (!std::isfinite(x)) return false;
  return true;
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

namespace {

void check_axis(const GridSpec& s, int axis) {
  if (axis < 1 || axis > s.dim()) {
    std::ostringstream os;
    os << "axis " << axis << " out of range for a " << s.dim() << "-D grid";
    throw PreconditionError(os.str());
  }
}

// 1-D first-derivative weights at position i of n points, as (offset, weight)
// pairs scaled by 1/h by the caller.
struct Weights {
  int count = 0;
  std::array<int, 4> offset{};
  std::array<double, 4> w{};
};

Weights first_weights(std::size_t i, std::size_t n) {
  Weights k;
  if (i == 0) {
    k.count = 3;
    k.offset = {0, 1, 2, 0};
    k.w = {-1.5, 2.0, -0.5, 0.0};
  } else if (i + 1 == n) {
    k.count = 3;
    k.offset = {0, -1, -2, 0};
    k.w = {1.5, -2.0, 0.5, 0.0};
  } else {
    k.count = 2;
    k.offset = {1, -1, 0, 0};
    k.w = {0.5, -0.5, 0.0, 0.0};
  }
  return k;
}

Weights second_weights(std::size_t i, std::size_t n) {
  Weights k;
  if (i == 0) {
    k.count = 4;
    k.offset = {0, 1, 2, 3};
    k.w = {2.0, -5.0, 4.0, -1.0};
  } else if (i + 1 == n) {
    k.count = 4;
    k.offset = {0, -1, -2, -3};
    k.w = {2.0, -5.0, 4.0, -1.0};
  } else {
    k.count = 3;
    k.offset = {-1, 0, 1, 0};
    k.w = {1.0, -2.0, 1.0, 0.0};
  }
  return k;
}

}  // namespace

ScalarField partial(const ScalarField& f, int axis) {
  const GridSpec& s = f.spec;
  check_axis(s, axis);
  const int a = axis - 1;
  const std::size_t n = s.points(a);
  const auto st = static_cast<std::ptrdiff_t>(s.stride(a));
  const double inv_h = 1.0 / s.spacing(a);
  ScalarField out(s);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(s.size()); ++k) {
    const std::size_t i = s.multi_index(static_cast<std::size_t>(k))[a];
    const Weights w = first_weights(i, n);
    double acc = 0.0;
    for (int q = 0; q < w.count; ++q) acc += w.w[q] * f.values[k + w.offset[q] * st];
    out.values[k] = acc * inv_h;
  }
  return out;
}

ScalarField second_partial(const ScalarField& f, int axis_a, int axis_b) {
  const GridSpec& s = f.spec;
  check_axis(s, axis_a);
  check_axis(s, axis_b);
  ScalarField out(s);
  if (axis_a == axis_b) {
    const int a = axis_a - 1;
    const std::size_t n = s.points(a);
    const auto st = static_cast<std::ptrdiff_t>(s.stride(a));
    const double inv_h2 = 1.0 / (s.spacing(a) * s.spacing(a));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(s.size()); ++k) {
      const std::size_t i = s.multi_index(static_cast<std::size_t>(k))[a];
      const Weights w = second_weights(i, n);
      double acc = 0.0;
      for (int q = 0; q < w.count; ++q) acc += w.w[q] * f.values[k + w.offset[q] * st];
      out.values[k] = acc * inv_h2;
    }
    return out;
  }
  const int a = std::min(axis_a, axis_b) - 1;
  const int b = std::max(axis_a, axis_b) - 1;
  const auto sa = static_cast<std::ptrdiff_t>(s.stride(a));
  const auto sb = static_cast<std::ptrdiff_t>(s.stride(b));
  const double inv = 1.0 / (s.spacing(a) * s.spacing(b));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(s.size()); ++k) {
    const auto m = s.multi_index(static_cast<std::size_t>(k));
    const Weights wa = first_weights(m[a], s.points(a));
    const Weights wb = first_weights(m[b], s.points(b));
    double acc = 0.0;
    for (int p = 0; p < wa.count; ++p) {
      double inner = 0.0;
      for (int q = 0; q < wb.count; ++q) inner += wb.w[q] * f.values[k + wa.offset[p] * sa + wb.offset[q] * sb];
      acc += wa.w[p] * inner;
    }
    out.values[k] = acc * inv;
  }
  return out;
}

double support_margin(const State& s, double radius, const ElasticConstants& c) {
  const GridSpec& g = s.spec();
  double ext = g.extent(0);
  for (int a = 1; a < g.dim(); ++a) ext = std::min(ext, g.extent(a));
  return ext - (radius + s.t * c.max_speed());
}

double support_radius_of(const State& s, double threshold) {
  const GridSpec& g = s.spec();
  double r = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(s.u[k]) > threshold || std::abs(s.v[k]) > threshold) {
      const auto x = g.position(k);
      r = std::max(r, std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    }
  }
  return r;
}

}  // namespace nematowave
