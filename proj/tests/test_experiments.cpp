#include <gtest/gtest.h>

#include <cmath>

#include "nematowave/diagnostics.hpp"
#include "nematowave/errors.hpp"
#include "nematowave/experiments.hpp"

using namespace nematowave;
namespace {

double unit_bump(double r2) { return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0; }

TEST(Family, BumpMaxSlope) {
  // brute-force maximum of d/dr exp(1 - 1/(1 - r^2))
  double best = 0.0;
  for (int i = 1; i < 200000; ++i) {
    const double r = i / 200000.0, q = 1.0 - r * r;
    best = std::max(best, std::exp(1.0 - 1.0 / q) * 2.0 * r / (q * q));
  }
  EXPECT_NEAR(bump_max_slope(), best, 1e-8);
}

TEST(Family, ZeroAmplitudeGivesZeroState) {
  const GridSpec g(2, 3.0, 21);
  InitialDataFamily f;
  f.amplitude = 0.0;
  const State s = make_initial(f, g, {1, 1, 2});
  EXPECT_EQ(s.u.max_abs(), 0.0);
  EXPECT_EQ(s.v.max_abs(), 0.0);
  EXPECT_EQ(s.t, 0.0);
}

TEST(Family, BumpSamples) {
  const GridSpec g(3, 2.0, 17);
  InitialDataFamily f;
  f.amplitude = 0.3;
  f.support_radius = 1.5;
  const State s = make_initial(f, g, {1, 1, 2});
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto x = g.position(k);
    const double r2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (1.5 * 1.5);
    ASSERT_NEAR(s.u[k], 0.3 * unit_bump(r2), 1e-15);
    ASSERT_EQ(s.v[k], 0.0);
  }
  EXPECT_NEAR(s.u[g.index(8, 8, 8)], 0.3, 1e-15);
}

TEST(Family, SteepBumpGradient) {
  const GridSpec g(1, 3.0, 6001);
  InitialDataFamily f;
  f.profile = InitialDataFamily::Profile::SteepBump;
  f.amplitude = 0.1;
  f.support_radius = 1.0;
  f.steepness = 10.0;
  const State s = make_initial(f, g, {1, 1, 2});
  const double d = partial(s.u, 1).max_abs();
  EXPECT_GE(d, 5 * f.amplitude);
  EXPECT_LE(d, 20 * f.amplitude / f.support_radius);
  EXPECT_NEAR(d, 1.0, 2e-3);
  EXPECT_NEAR(s.u.max_abs(), 0.1, 1e-6);
}

TEST(Family, RightMovingVelocity) {
  const GridSpec g(1, 3.0, 601);
  const ElasticConstants c{1, 1, 2};
  InitialDataFamily f;
  f.amplitude = 0.2;
  f.velocity = InitialDataFamily::Velocity::RightMoving;
  const State s = make_initial(f, g, c);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.position(k)[0], q = 1.0 - x * x;
    const double ux = q > 0.0 ? -0.2 * std::exp(1.0 - 1.0 / q) * 2.0 * x / (q * q) : 0.0;
    ASSERT_NEAR(s.v[k], -std::sqrt(wave_speeds(c, s.u[k]).c1_sq) * ux, 1e-14);
  }
}

TEST(Family, Rejections) {
  const GridSpec g(2, 1.0, 21);
  InitialDataFamily f;
  f.support_radius = 1.0;  // touches the boundary
  EXPECT_THROW(make_initial(f, g, {1, 1, 2}), PreconditionError);
  f.support_radius = 0.5;
  f.amplitude = -0.1;
  EXPECT_THROW(make_initial(f, g, {1, 1, 2}), PreconditionError);
  f.amplitude = 0.1;
  f.profile = InitialDataFamily::Profile::Custom;
  EXPECT_THROW(make_initial(f, g, {1, 1, 2}), PreconditionError);
}

Experiment small_1d() {
  Experiment e{GridSpec(1, 6.0, 241), {}, {}};
  e.family.amplitude = 0.1;
  e.solver.constants = {1, 1, 2};
  e.solver.t_final = 0.5;
  e.solver.record_every = 10;
  e.solver.diagnostics.gamma_order = 0;
  e.solver.diagnostics.modified_energy = false;
  return e;
}

TEST(Lifespan, RejectsBadAmplitudes) {
  const auto e = small_1d();
  EXPECT_THROW(lifespan_scan({}, e), PreconditionError);
  EXPECT_THROW(lifespan_scan({0.1, 0.0}, e), PreconditionError);
  EXPECT_THROW(lifespan_scan({0.1, -0.2}, e), PreconditionError);
  EXPECT_THROW(lifespan_scan({0.1, 0.2, 0.1}, e), PreconditionError);
}

TEST(Lifespan, CensoredRowsAndOrdering) {
  auto e = small_1d();
  int calls = 0;
  const auto t = lifespan_scan({0.05, 0.2, 0.1}, e, [&](const LifespanRow&, const RunOutcome&) { ++calls; });
  EXPECT_EQ(calls, 3);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].amplitude, 0.2);
  EXPECT_EQ(t.rows[2].amplitude, 0.05);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.censored);
    EXPECT_EQ(r.t_num, e.solver.t_final);
    EXPECT_EQ(r.status, RunStatus::Completed);
  }
  EXPECT_FALSE(t.slope.has_value());
  EXPECT_TRUE(t.nonincreasing());
}

TEST(Lifespan, EqualConstantsNeverBlowUp) {
  auto e = small_1d();
  e.solver.constants = {1.5, 1, 1.5};
  e.family.profile = InitialDataFamily::Profile::SteepBump;
  e.family.steepness = 8;
  e.solver.blowup_gradient_factor = 3;
  const auto t = lifespan_scan({0.3, 0.2}, e);
  for (const auto& r : t.rows) EXPECT_TRUE(r.censored);
}

TEST(Lifespan, DetectedRowsAndFit) {
  // a tiny factor makes the threshold reachable at once
  auto e = small_1d();
  e.family.profile = InitialDataFamily::Profile::SteepBump;
  e.family.steepness = 8;
  e.family.velocity = InitialDataFamily::Velocity::RightMoving;
  e.solver.t_final = 3.0;
  e.solver.blowup_gradient_factor = 1.05;
  const auto t = lifespan_scan({0.3, 0.2}, e);
  for (const auto& r : t.rows) {
    if (r.censored) continue;
    EXPECT_EQ(r.status, RunStatus::BlowupDetected);
    EXPECT_LE(r.t_num, e.solver.t_final);
    EXPECT_GE(r.peak_grad_max, r.initial_grad_max);
  }
}

TEST(Lifespan, TableHelpers) {
  LifespanTable t;
  t.rows = {{0.4, "", 1.0, RunStatus::BlowupDetected, false, 0, 0},
            {0.2, "", 3.0, RunStatus::BlowupDetected, false, 0, 0},
            {0.1, "", 3.5, RunStatus::BlowupDetected, false, 0, 0}};
  EXPECT_TRUE(t.nonincreasing());
  t.rows[2].t_num = 5.0;
  EXPECT_TRUE(t.nonincreasing());
  t.rows[1].t_num = 0.5;
  EXPECT_FALSE(t.nonincreasing());
}

TEST(Blowup, Preconditions) {
  auto e = small_1d();
  e.solver.constants = {2, 1, 2};
  EXPECT_THROW(blowup_demo_1d(e), PreconditionError);
  auto f = small_1d();
  f.grid = GridSpec(2, 6.0, 41);
  EXPECT_THROW(blowup_demo_1d(f), PreconditionError);
}

TEST(Blowup, ShortRunReportsControlAndSeries) {
  auto e = small_1d();
  e.family.velocity = InitialDataFamily::Velocity::RightMoving;
  e.solver.t_final = 0.3;
  const auto r = blowup_demo_1d(e, true);
  EXPECT_FALSE(r.detected());
  EXPECT_TRUE(r.control_completed());
  EXPECT_EQ(r.gradient_series.size(), r.main.diagnostics.size());
  EXPECT_LE(r.pre_detection_drift, 1e-4);
  ASSERT_TRUE(r.refined.has_value());
  EXPECT_EQ(r.refined->final_state.spec().points(0), 481u);
  ASSERT_TRUE(r.refinement_shift.has_value());
  EXPECT_LE(*r.refinement_shift, 1e-12);
}

TEST(Convergence, AffineIsExactWithPointwiseScheme) {
  Experiment e{GridSpec(2, 1.0, 9), {}, {}};
  e.solver.constants = {1, 1, 2};
  e.solver.scheme = Scheme::Pointwise;
  e.solver.t_final = 0.5;
  ManufacturedSolution m;
  m.kind = ManufacturedSolution::Kind::Affine;
  e.solver.source = m;
  const auto r = convergence_study(e);
  ASSERT_EQ(r.space_errors.size(), 3u);
  for (double x : r.space_errors) EXPECT_LE(x, 1e-12);
  ASSERT_EQ(r.time_differences.size(), 2u);
  for (double x : r.time_differences) EXPECT_LE(x, 1e-12);
}

TEST(Convergence, NeedsSource) {
  const auto e = small_1d();
  EXPECT_THROW(convergence_study(e), PreconditionError);
}

TEST(Describe, Grid) {
  EXPECT_EQ(describe(GridSpec(2, {3.0, 2.0, 0.0}, {16, 8, 1})), "2d:16x8:h=" + format_double(6.0 / 15.0));
}

}  // namespace
