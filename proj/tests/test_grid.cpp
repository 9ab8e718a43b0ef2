#include <gtest/gtest.h>

#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nematowave/errors.hpp"
#include "nematowave/grid.hpp"

using namespace nematowave;
namespace {

TEST(GridSpec, DerivedSpacingAndLayout) {
  const GridSpec g(3, {2.0, 1.0, 3.0}, {9, 11, 13});
  EXPECT_NEAR(g.spacing(0), 0.5, 1e-15);
  EXPECT_NEAR(g.spacing(1), 0.2, 1e-15);
  EXPECT_NEAR(g.spacing(2), 0.5, 1e-15);
  EXPECT_EQ(g.size(), 9u * 11u * 13u);
  EXPECT_EQ(g.stride(2), 1u);
  EXPECT_EQ(g.stride(1), 13u);
  EXPECT_EQ(g.stride(0), 11u * 13u);
  const std::size_t k = g.index(3, 4, 5);
  const auto m = g.multi_index(k);
  EXPECT_EQ(m[0], 3u);
  EXPECT_EQ(m[1], 4u);
  EXPECT_EQ(m[2], 5u);
  const auto x = g.position(k);
  EXPECT_NEAR(x[0], -2.0 + 3 * 0.5, 1e-15);
  EXPECT_NEAR(x[1], -1.0 + 4 * 0.2, 1e-15);
  EXPECT_NEAR(x[2], -3.0 + 5 * 0.5, 1e-15);
  EXPECT_TRUE(g.is_boundary(g.index(0, 4, 5)));
  EXPECT_TRUE(g.is_boundary(g.index(3, 4, 12)));
  EXPECT_FALSE(g.is_boundary(k));
}

TEST(GridSpec, UnusedAxesCollapse) {
  const GridSpec g(1, 1.0, 8);
  EXPECT_EQ(g.points(1), 1u);
  EXPECT_EQ(g.points(2), 1u);
  EXPECT_EQ(g.size(), 8u);
  EXPECT_NEAR(g.cell_volume(), 2.0 / 7.0, 1e-15);
}

TEST(GridSpec, RejectsBadInput) {
  EXPECT_THROW(GridSpec(1, 1.0, 7), PreconditionError);
  EXPECT_THROW(GridSpec(4, 1.0, 10), PreconditionError);
  EXPECT_THROW(GridSpec(2, -1.0, 10), PreconditionError);
  EXPECT_THROW(GridSpec(2, 0.0, 10), PreconditionError);
}

TEST(Partial, ConstantAndAffineAreExact) {
  const GridSpec g(3, {1.0, 2.0, 1.5}, {9, 10, 11});
  const auto c = sample(g, [](double, double, double) { return 3.25; });
  for (int a = 1; a <= 3; ++a) EXPECT_LE(partial(c, a).max_abs(), 1e-13);
  const auto f = sample(g, [](double x, double y, double z) { return 0.5 + 2 * x - 3 * y + 0.25 * z; });
  const double slope[3] = {2, -3, 0.25};
  for (int a = 1; a <= 3; ++a) {
    const auto d = partial(f, a);
    for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(d[k], slope[a - 1], 1e-12);
  }
}

TEST(Partial, AxisOutOfRange) {
  const GridSpec g(2, 1.0, 10);
  const ScalarField f(g);
  EXPECT_THROW(partial(f, 3), PreconditionError);
  EXPECT_THROW(partial(f, 0), PreconditionError);
  EXPECT_THROW(second_partial(f, 1, 3), PreconditionError);
}

TEST(Partial, SineWithinTaylorBound) {
  for (std::size_t n : {41u, 81u}) {
    const GridSpec g(1, 3.0, n);
    const double h = g.spacing(0);
    const auto f = sample(g, [](double x, double, double) { return std::sin(x); });
    const auto d = partial(f, 1);
    double interior = 0.0, boundary = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = std::abs(d[k] - std::cos(g.coordinate(0, k)));
      double& slot = (k == 0 || k + 1 == n) ? boundary : interior;
      slot = std::max(slot, e);
    }
    EXPECT_LE(interior, h * h / 6.0 * 1.0);
    // one-sided: |f'''| h^2 / 3
    EXPECT_LE(boundary, h * h / 3.0 * 1.0);
  }
}

TEST(SecondPartial, QuadraticsAreExact) {
  const GridSpec g(3, {1.0, 1.3, 0.9}, {9, 12, 10});
  const auto f = sample(g, [](double x, double y, double z) { return x * y + 2 * x * x - y * z + 0.5 * z * z + x; });
  const double want[3][3] = {{4, 1, 0}, {1, 0, -1}, {0, -1, 1}};
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      const auto d = second_partial(f, a, b);
      for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(d[k], want[a - 1][b - 1], 1e-10) << a << b << k;
    }
}

TEST(SecondPartial, MixedIsSymmetricBitwise) {
  const GridSpec g(3, 1.0, 12);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1, 1);
  ScalarField f(g);
  for (auto& x : f.values) x = U(rng);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) EXPECT_EQ(second_partial(f, a, b).values, second_partial(f, b, a).values);
}

TEST(SecondPartial, CrossDerivativeSecondOrder) {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const GridSpec g(2, 2.0, r == 0 ? 41 : 81);
    const auto f = sample(g, [](double x, double y, double) { return std::sin(x) * std::cos(y); });
    const auto d = second_partial(f, 1, 2);
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto x = g.position(k);
      m = std::max(m, std::abs(d[k] + std::cos(x[0]) * std::sin(x[1])));
    }
    err[r] = m;
  }
  EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
}

TEST(Stencils, Linear) {
  const GridSpec g(2, 1.0, 16);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  ScalarField f(g), h(g), comb(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    f[k] = U(rng);
    h[k] = U(rng);
    comb[k] = 2.5 * f[k] - 0.75 * h[k];
  }
  for (int a = 1; a <= 2; ++a) {
    const auto df = partial(f, a), dh = partial(h, a), dc = partial(comb, a);
    for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(dc[k], 2.5 * df[k] - 0.75 * dh[k], 1e-12);
  }
  const auto df = second_partial(f, 1, 2), dh = second_partial(h, 1, 2), dc = second_partial(comb, 1, 2);
  for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(dc[k], 2.5 * df[k] - 0.75 * dh[k], 1e-11);
}

TEST(Stencils, IntegrationByParts) {
  // <d f, g> + <f, d g> for fields vanishing near the boundary
  double defect[2];
  for (int r = 0; r < 2; ++r) {
    const GridSpec g(2, 3.0, r == 0 ? 61 : 121);
    auto bump = [](double x, double y, double cx) {
      const double q = (x - cx) * (x - cx) + y * y;
      return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    };
    const auto f = sample(g, [&](double x, double y, double) { return bump(x, y, 0.3) * std::sin(2 * x); });
    const auto h = sample(g, [&](double x, double y, double) { return bump(x, y, -0.2) * (1 + y); });
    const auto df = partial(f, 1), dh = partial(h, 1);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += df[k] * h[k] + f[k] * dh[k];
    defect[r] = std::abs(s * g.cell_volume());
  }
  // centered differences are exactly skew-adjoint in the interior
  EXPECT_LE(defect[0], 1e-12);
  EXPECT_LE(defect[1], 1e-12);
}

TEST(Stencils, DeterministicAcrossThreadCounts) {
  const GridSpec g(3, 1.0, 24);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1, 1);
  ScalarField f(g);
  for (auto& x : f.values) x = U(rng);
  const auto a = second_partial(f, 1, 3).values;
  const auto b = partial(f, 2).values;
#ifdef _OPENMP
  omp_set_num_threads(3);
#endif
  EXPECT_EQ(second_partial(f, 1, 3).values, a);
  EXPECT_EQ(partial(f, 2).values, b);
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
}

TEST(SupportMargin, Examples) {
  const GridSpec g(2, 10.0, 16);
  State s(g);
  const ElasticConstants c{1, 1, 4};
  EXPECT_DOUBLE_EQ(support_margin(s, 1.0, c), 9.0);
  s.t = (10.0 - 1.0) / 2.0;
  EXPECT_NEAR(support_margin(s, 1.0, c), 0.0, 1e-14);
  s.t += 0.1;
  EXPECT_LT(support_margin(s, 1.0, c), 0.0);
}

TEST(SupportRadius, OfBump) {
  const GridSpec g(2, 3.0, 61);
  State s(g);
  s.u = sample(g, [](double x, double y, double) {
    const double q = x * x + y * y;
    return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  });
  const double r = support_radius_of(s, 1e-12);
  EXPECT_LE(r, 1.0);
  EXPECT_GE(r, 0.8);
}

TEST(ScalarField, FiniteAndMax) {
  const GridSpec g(1, 1.0, 8);
  ScalarField f(g, -2.0);
  EXPECT_TRUE(f.all_finite());
  EXPECT_EQ(f.max_abs(), 2.0);
  f[3] = std::nan("");
  EXPECT_FALSE(f.all_finite());
}

}  // namespace
