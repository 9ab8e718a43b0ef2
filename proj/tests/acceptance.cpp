// Acceptance suite: one PASS/FAIL line per criterion, plus the measured
// numbers behind it. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nematowave/diagnostics.hpp"
#include "nematowave/experiments.hpp"
#include "nematowave/kernels.hpp"
#include "nematowave/model.hpp"
#include "nematowave/solver.hpp"

using namespace nematowave;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// ---------------------------------------------------------------- 1, 2

Verdict algebra() {
  const AlgebraReport r = verify_algebra(10000, 7);
  std::ostringstream os;
  os << "samples=" << r.samples << " spectrum=" << r.max_spectrum_deviation
     << " det=" << r.max_determinant_deviation << " min_eig(Abar)=" << r.min_rescaled_eigenvalue
     << " trace(Abar)=" << r.max_rescaled_trace_deviation;
  return {r.passed() && r.samples >= 10000, os.str()};
}

Verdict reduction() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0), L(std::log(0.1), std::log(10.0));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ElasticConstants c{std::exp(L(rng)), std::exp(L(rng)), std::exp(L(rng))};
    const double u = 4.0 * M_PI * U(rng);
    const Vec3 g{3 * U(rng), 3 * U(rng), 3 * U(rng)};
    const double of = oseen_frank_density(c, director_from_angle(u), director_gradient(u, g));
    const double pl = planar_energy_density(c, u, g, 0.0).elastic();
    worst = std::max(worst, std::abs(of - pl) / std::max(1.0, std::abs(pl)));
  }
  return {worst <= 1e-12, "samples=1000 max_rel_dev=" + fmt("%.3g", worst)};
}

// ---------------------------------------------------------------- 3

Verdict derivation() {
  const ElasticConstants c{1, 1, 2};
  auto u = [](double t, const Vec3& x) {
    const double q = (x[0] * x[0] + x[1] * x[1]) / 4.0;
    const double b = q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    return 0.3 * std::cos(t) * b;
  };
  const GridSpec g1(2, 3.0, 61), g2(2, 3.0, 121);
  const double r1 = el_residual(u, c, g1, 0.5 * g1.spacing(0));
  const double r2 = el_residual(u, c, g2, 0.5 * g2.spacing(0));
  const double ratio = r1 / r2;
  return {ratio >= 3.6, "h=" + fmt("%.4g", g1.spacing(0)) + " d(h)=" + fmt("%.3e", r1) + " d(h/2)=" +
                            fmt("%.3e", r2) + " ratio=" + fmt("%.3f", ratio)};
}

// ---------------------------------------------------------------- 4, 9, 10

constexpr double kRun4Extent = 11.0;
constexpr double kRun4Radius = 3.0;

Experiment run4_experiment() {
  Experiment e{GridSpec(2, kRun4Extent, 128), {}, {}};
  e.family.amplitude = 0.05;
  e.family.support_radius = kRun4Radius;
  e.solver.constants = {1, 1, 2};
  e.solver.cfl_safety = 0.4;
  e.solver.t_final = 5.0;
  e.solver.record_every = 8;
  e.solver.diagnostics.gamma_order = 1;
  e.solver.diagnostics.modified_energy = true;
  e.solver.diagnostics.probes = true;
  return e;
}

RunOutcome run4(int threads) {
  set_threads(threads);
  const Experiment e = run4_experiment();
  RunOutcome out = run(make_initial(e.family, e.grid, e.solver.constants), e.solver, e.family.support_radius);
  set_threads(1);
  return out;
}

double relative_drift(const RunOutcome& o) {
  const double e0 = o.diagnostics.front().total_energy;
  double d = 0.0;
  for (const auto& r : o.diagnostics) d = std::max(d, std::abs(r.total_energy - e0));
  return d / e0;
}

std::string csv_of(const RunOutcome& o) {
  std::ostringstream os;
  write_csv(os, o.diagnostics);
  return os.str();
}

Verdict energy(const RunOutcome& o) {
  const double d = relative_drift(o);
  return {o.status == RunStatus::Completed && d <= 1e-4,
          std::string("status=") + to_string(o.status) + " steps=" + std::to_string(o.steps) +
              " max_rel_drift=" + fmt("%.3e", d)};
}

Verdict determinism(const RunOutcome& first) {
  const int threads = 4;
  const RunOutcome second = run4(threads);
  const bool same = csv_of(first) == csv_of(second);
  return {same, "threads 1 vs " + std::to_string(threads) + ", records=" + std::to_string(first.diagnostics.size()) +
                    (same ? " identical" : " DIFFER")};
}

Verdict probes(const RunOutcome& o) {
  // reference values: first record at t >= 1 where the probe is present
  auto check = [&](auto get, const char* name, std::string& text) {
    std::optional<double> ref;
    double sup = 0.0;
    bool finite = true;
    std::size_t count = 0;
    for (const auto& r : o.diagnostics) {
      const std::optional<double> v = get(r);
      if (!v) continue;
      if (!std::isfinite(*v)) finite = false;
      if (r.t < 1.0) continue;
      if (!ref) ref = *v;
      sup = std::max(sup, *v);
      ++count;
    }
    const bool ok = finite && ref && count > 1 && sup <= 10.0 * *ref;
    text += std::string(name) + ": ref=" + fmt("%.4g", ref.value_or(NAN)) + " sup=" + fmt("%.4g", sup) +
            " n=" + std::to_string(count) + " ";
    return ok;
  };
  std::string text;
  const bool a = check([](const DiagnosticsRecord& r) { return r.decay_ratio; }, "decay", text);
  const bool b = check([](const DiagnosticsRecord& r) { return r.product_ratio; }, "product", text);
  return {a && b, text};
}

// ---------------------------------------------------------------- 5

Verdict convergence() {
  Experiment e{GridSpec(2, 4.0, 33), {}, {}};
  e.solver.constants = {1, 1, 2};
  e.solver.t_final = 1.0;
  e.solver.cfl_safety = 0.4;
  ManufacturedSolution m;
  m.kind = ManufacturedSolution::Kind::Gaussian;
  e.solver.source = m;
  const ConvergenceReport r = convergence_study(e);
  const double space = std::min(r.space_orders[0], r.space_orders[1]);
  std::ostringstream os;
  os << "errors=" << fmt("%.3e", r.space_errors[0]) << "," << fmt("%.3e", r.space_errors[1]) << ","
     << fmt("%.3e", r.space_errors[2]) << " space_orders=" << fmt("%.3f", r.space_orders[0]) << ","
     << fmt("%.3f", r.space_orders[1]) << " time_order=" << fmt("%.3f", r.time_order);
  return {space >= 1.9 && r.time_order >= 3.8, os.str()};
}

// ---------------------------------------------------------------- 6

Verdict commutators() {
  // Translations and rotations commute with the centred discrete box exactly
  // and the scaling identity is exact on t^2 - |x|^2, so those residuals sit
  // at rounding level (which grows like eps / (dt h)^2 on fine grids); they
  // are checked against a floor on a coarse pair. The scaling residual on the
  // bump is a genuine O(h^2) error. The bump's high derivatives are large near
  // the edge of its support, so that pair sits on fine grids (coarser pairs
  // give orders 1.2, 1.4, 1.8 on the way in).
  constexpr double kFloor = 1e-8;
  auto bump = [](double t, const Vec3& x) {
    const double q = ((x[0] - 0.3) * (x[0] - 0.3) + x[1] * x[1]) / 4.0;
    return q < 1.0 ? std::cos(t) * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  auto quad = [](double t, const Vec3& x) { return t * t - (x[0] * x[0] + x[1] * x[1]); };
  const GridSpec c1(2, 3.0, 61), c2(2, 3.0, 121), f1(2, 3.0, 961), f2(2, 3.0, 1921);
  bool ok = true;
  std::ostringstream os;
  auto pair = [&](const char* name, const SpaceTimeFunction& f, const VectorFieldId& id, const GridSpec& g1,
                  const GridSpec& g2, bool exact) {
    const double a = commutator_residual(f, id, g1, 0.5 * g1.spacing(0), 0.2);
    const double b = commutator_residual(f, id, g2, 0.5 * g2.spacing(0), 0.2);
    const double order = std::log2(a / b);
    ok = ok && (exact ? a <= kFloor && b <= kFloor : order >= 1.9);
    os << name << "=" << fmt("%.2e", a) << "->" << fmt("%.2e", b);
    if (exact)
      os << "(<=" << fmt("%.0e", kFloor) << ") ";
    else
      os << "(order " << fmt("%.2f", order) << ") ";
  };
  pair("[box,d1]bump", bump, VectorFieldId::partial(1), c1, c2, true);
  pair("[box,d2]bump", bump, VectorFieldId::partial(2), c1, c2, true);
  pair("[box,O12]bump", bump, VectorFieldId::rotation(1, 2), c1, c2, true);
  pair("[box,L]-2box:quad", quad, VectorFieldId::scaling(), c1, c2, true);
  pair("[box,L]-2box:bump", bump, VectorFieldId::scaling(), f1, f2, false);
  return {ok, os.str()};
}

// ---------------------------------------------------------------- 7

// Default detection factor. The grid is the finest that fits the time budget
// for main run plus control out to T = 40 (the gradient peaks near t = 29 on
// finer grids and decays afterwards).
constexpr double kBlowupFactor = 100.0;
constexpr double kBlowupExtent = 58.0;
constexpr std::size_t kBlowupPoints = 29001;
constexpr double kBlowupFinal = 40.0;

Verdict blowup() {
  Experiment e{GridSpec(1, kBlowupExtent, kBlowupPoints), {}, {}};
  e.family.profile = InitialDataFamily::Profile::SteepBump;
  e.family.amplitude = 0.1;
  e.family.support_radius = 1.0;
  e.family.steepness = 10.0;
  e.family.velocity = InitialDataFamily::Velocity::RightMoving;
  e.solver.constants = {1, 1, 2};
  e.solver.t_final = kBlowupFinal;
  e.solver.blowup_gradient_factor = kBlowupFactor;
  e.solver.record_every = 100;
  e.solver.diagnostics.gamma_order = 0;
  e.solver.diagnostics.modified_energy = false;
  const BlowupReport r = blowup_demo_1d(e);
  const State init = make_initial(e.family, e.grid, e.solver.constants);
  const double c1 = partial(init.u, 1).max_abs();
  std::ostringstream os;
  os << "sup|u0|=" << fmt("%.3g", init.u.max_abs()) << " sup|u0'|=" << fmt("%.3g", c1) << " h=" << fmt("%.3g", e.grid.spacing(0))
     << " factor=" << kBlowupFactor << " main=" << to_string(r.main.status) << " T_num=" << fmt("%.4g", r.main.t_end)
     << " peak/initial=" << fmt("%.3g", r.main.peak_grad_max / r.main.initial_grad_max)
     << " drift=" << fmt("%.2e", r.pre_detection_drift) << " control=" << to_string(r.control.status)
     << " control_peak/initial=" << fmt("%.3g", r.control.peak_grad_max / r.control.initial_grad_max);
  double tpeak = 0.0, gpeak = 0.0;
  for (const auto& [t, g] : r.gradient_series)
    if (g > gpeak) {
      gpeak = g;
      tpeak = t;
    }
  os << " recorded_peak_at_t=" << fmt("%.3g", tpeak);
  return {r.detected() && r.pre_detection_drift <= 1e-3 && r.control_completed(), os.str()};
}

// ---------------------------------------------------------------- 8

// With the default factor of 100 no row is ever detected on an affordable
// grid and every row is censored at t_final, which satisfies monotonicity
// vacuously. A 25% growth threshold turns the scan into a real comparison:
// along a compressive characteristic the gradient grows like 1/(1 - t/T*), so
// the crossing time is a fixed fraction of the lifespan.
constexpr double kScanExtent = 37.0;
constexpr std::size_t kScanPoints = 29601;
constexpr double kScanFinal = 25.0;
constexpr double kScanFactor = 1.25;

Verdict lifespan() {
  Experiment e{GridSpec(1, kScanExtent, kScanPoints), {}, {}};
  e.family.profile = InitialDataFamily::Profile::SteepBump;
  e.family.support_radius = 1.0;
  e.family.steepness = 10.0;
  e.family.velocity = InitialDataFamily::Velocity::RightMoving;
  e.solver.constants = {1, 1, 2};
  e.solver.t_final = kScanFinal;
  e.solver.blowup_gradient_factor = kScanFactor;
  e.solver.record_every = 200;
  e.solver.diagnostics.gamma_order = 0;
  e.solver.diagnostics.modified_energy = false;
  const LifespanTable t = lifespan_scan({0.4, 0.2, 0.1, 0.05}, e);
  std::ostringstream os;
  for (const auto& r : t.rows)
    os << "eps=" << r.amplitude << ":T=" << fmt("%.4g", r.t_num) << (r.censored ? "(censored) " : " ");

  // 3-D small data on a coarse grid; the box is sized so the support margin
  // stays positive up to T = 50
  Experiment s{GridSpec(3, 84.0, 64), {}, {}};
  s.family.amplitude = 0.01;
  s.family.support_radius = 12.0;
  s.solver.constants = {1, 1, 2};
  s.solver.t_final = 50.0;
  s.solver.record_every = 10;
  s.solver.diagnostics.gamma_order = 0;
  s.solver.diagnostics.modified_energy = false;
  const RunOutcome o = run(make_initial(s.family, s.grid, s.solver.constants), s.solver, s.family.support_radius);
  const double growth = o.peak_grad_max / o.initial_grad_max;
  os << "| 3-D 64^3 eps=0.01: " << to_string(o.status) << " t=" << fmt("%.4g", o.t_end)
     << " peak/initial=" << fmt("%.3f", growth);
  return {t.nonincreasing() && o.status == RunStatus::Completed && o.t_end >= 50.0 - 1e-9 && growth <= 3.0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  // optional arguments select criteria by number
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  set_threads(1);
  std::printf("kernels: %s\n", kernels::active().name);
  int failed = 0, evaluated = 0;
  auto report = [&](int id, const char* title, const std::function<Verdict()>& f) {
    if (!wanted(id)) return;
    ++evaluated;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("[%s] %2d %-28s (%.1f s) %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "algebra identities", algebra);
  report(2, "planar reduction", reduction);
  report(3, "Euler-Lagrange check", derivation);
  RunOutcome r4;
  bool have_r4 = false;
  auto need_r4 = [&] {
    if (!have_r4) r4 = run4(1);
    have_r4 = true;
  };
  report(4, "energy conservation", [&] {
    need_r4();
    return energy(r4);
  });
  report(5, "MMS convergence", convergence);
  report(6, "commutator identities", commutators);
  report(7, "1-D gradient blowup", blowup);
  report(8, "lifespan monotonicity", lifespan);
  report(9, "determinism", [&] {
    need_r4();
    return determinism(r4);
  });
  report(10, "inequality probes", [&] {
    need_r4();
    return probes(r4);
  });
  std::printf("criteria evaluated: %d, failed: %d\n", evaluated, failed);
  return failed;
}
