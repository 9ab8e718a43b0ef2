#include "nematowave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nematowave/errors.hpp"
#include "nematowave/snapshot.hpp"

namespace nematowave {

double bump_max_slope() {
  // Golden-section search on r -> 2r/(1-r^2)^2 * exp(1 - 1/(1-r^2)).
  static const double value = [] {
    auto g = [](double r) {
      const double q = 1.0 - r * r;
      return 2.0 * r / (q * q) * std::exp(1.0 - 1.0 / q);
    };
    double a = 0.3, b = 0.95;
    const double k = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < 200; ++i) {
      const double c = b - k * (b - a), d = a + k * (b - a);
      if (g(c) > g(d))
        b = d;
      else
        a = c;
    }
    return g(0.5 * (a + b));
  }();
  return value;
}

const char* to_string(InitialDataFamily::Profile p) noexcept {
  switch (p) {
    case InitialDataFamily::Profile::Bump:
      return "bump";
    case InitialDataFamily::Profile::SteepBump:
      return "steep_bump";
    case InitialDataFamily::Profile::Custom:
      return "custom";
  }
  return "?";
}

const char* to_string(InitialDataFamily::Velocity v) noexcept {
  return v == InitialDataFamily::Velocity::Zero ? "zero" : "right_moving";
}

void InitialDataFamily::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw PreconditionError("amplitude must be nonnegative");
  if (!(support_radius > 0.0)) throw PreconditionError("support_radius must be positive");
  if (!(steepness >= 1.0)) throw PreconditionError("steepness must be at least 1");
  if (profile == Profile::Custom && custom_path.empty()) throw PreconditionError("custom profile needs a snapshot path");
}

double InitialDataFamily::x1_scale() const noexcept {
  if (profile != Profile::SteepBump) return 1.0;
  return std::max(1.0, steepness / bump_max_slope());
}

State make_initial(const InitialDataFamily& f, const GridSpec& spec, const ElasticConstants& c) {
  f.validate();
  if (f.profile == InitialDataFamily::Profile::Custom) {
    State s = read_snapshot_file(f.custom_path);
    if (!(s.spec() == spec)) throw PreconditionError("custom snapshot grid differs from the configured grid");
    return s;
  }
  for (int a = 0; a < spec.dim(); ++a)
    if (!(f.support_radius < spec.extent(a))) throw PreconditionError("initial data support exceeds the grid");

  const double r = f.support_radius, s1 = f.x1_scale();
  State s(spec, 0.0);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto x = spec.position(k);
    const double y1 = s1 * x[0] / r, y2 = x[1] / r, y3 = x[2] / r;
    const double rho2 = y1 * y1 + y2 * y2 + y3 * y3;
    if (rho2 >= 1.0) continue;
    const double q = 1.0 - rho2;
    const double b = std::exp(1.0 - 1.0 / q);
    s.u[k] = f.amplitude * b;
    if (f.velocity == InitialDataFamily::Velocity::RightMoving) {
      // d rho2 / d x1 = 2 y1 s1 / r;  d b / d rho2 = -b / q^2
      const double d1 = f.amplitude * (-b / (q * q)) * (2.0 * y1 * s1 / r);
      s.v[k] = -std::sqrt(wave_speeds(c, s.u[k]).c1_sq) * d1;
    }
  }
  return s;
}

std::string describe(const GridSpec& g) {
  std::ostringstream os;
  os << g.dim() << "d:";
  for (int a = 0; a < g.dim(); ++a) os << (a ? "x" : "") << g.points(a);
  os << ":h=" << format_double(g.min_spacing());
  return os.str();
}

bool LifespanTable::nonincreasing() const {
  // rows are sorted by amplitude descending, so T_num must not decrease
  // as we walk down the table
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].t_num < rows[i - 1].t_num) return false;
  return true;
}

LifespanTable lifespan_scan(const std::vector<double>& amplitudes, const Experiment& base,
                            const std::function<void(const LifespanRow&, const RunOutcome&)>& on_run) {
  if (amplitudes.empty()) throw PreconditionError("lifespan scan needs at least one amplitude");
  std::vector<double> amps = amplitudes;
  for (double a : amps)
    if (!(a > 0.0)) throw PreconditionError("lifespan amplitudes must be positive");
  std::sort(amps.begin(), amps.end(), std::greater<>());
  if (std::adjacent_find(amps.begin(), amps.end()) != amps.end())
    throw PreconditionError("lifespan amplitudes must be distinct");

  LifespanTable table;
  for (double a : amps) {
    Experiment e = base;
    e.family.amplitude = a;
    const State init = make_initial(e.family, e.grid, e.solver.constants);
    const RunOutcome out = run(init, e.solver, e.family.support_radius);
    LifespanRow row;
    row.amplitude = a;
    row.grid = describe(e.grid);
    row.status = out.status;
    row.censored = out.status == RunStatus::Completed;
    row.t_num = row.censored ? e.solver.t_final : out.t_end;
    row.initial_grad_max = out.initial_grad_max;
    row.peak_grad_max = out.peak_grad_max;
    if (on_run) on_run(row, out);
    table.rows.push_back(row);
  }

  std::vector<std::pair<double, double>> pts;
  for (const auto& r : table.rows)
    if (!r.censored && r.t_num > 0.0) pts.emplace_back(1.0 / r.amplitude, std::log(r.t_num));
  if (pts.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    if (sxx > 0.0) {
      table.slope = sxy / sxx;
      table.intercept = my - *table.slope * mx;
    }
  }
  return table;
}

namespace {

double pre_detection_drift(const RunOutcome& out) {
  if (out.diagnostics.empty()) return 0.0;
  const double e0 = out.diagnostics.front().total_energy;
  std::size_t n = out.diagnostics.size();
  if (out.status == RunStatus::BlowupDetected && n > 1) --n;  // drop the detection record
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(out.diagnostics[i].total_energy - e0));
  return e0 > 0.0 ? d / e0 : d;
}

}  // namespace

BlowupReport blowup_demo_1d(const Experiment& e, bool refine) {
  if (e.grid.dim() != 1) throw PreconditionError("blowup demo runs in one dimension");
  if (e.solver.constants.alpha == e.solver.constants.gamma)
    throw PreconditionError("blowup demo needs alpha != gamma");
  BlowupReport rep;
  const State init = make_initial(e.family, e.grid, e.solver.constants);
  rep.main = run(init, e.solver, e.family.support_radius);
  rep.pre_detection_drift = pre_detection_drift(rep.main);
  for (const auto& r : rep.main.diagnostics) rep.gradient_series.emplace_back(r.t, r.grad_max);

  Experiment ctl = e;
  ctl.solver.constants.alpha = ctl.solver.constants.gamma;
  const State cinit = make_initial(ctl.family, ctl.grid, ctl.solver.constants);
  rep.control = run(cinit, ctl.solver, ctl.family.support_radius);

  if (refine) {
    Experiment fine = e;
    fine.grid = GridSpec(1, e.grid.extent(0), 2 * e.grid.points(0) - 1);
    fine.solver.record_every = 2 * e.solver.record_every;
    const State finit = make_initial(fine.family, fine.grid, fine.solver.constants);
    rep.refined = run(finit, fine.solver, fine.family.support_radius);
    if (rep.main.t_end > 0.0) rep.refinement_shift = std::abs(rep.refined->t_end - rep.main.t_end) / rep.main.t_end;
  }
  return rep;
}

namespace {

double max_error(const State& s, const ManufacturedSolution& m) {
  double e = 0.0;
  for (std::size_t k = 0; k < s.spec().size(); ++k)
    e = std::max(e, std::abs(s.u[k] - m.value(s.t, s.spec().position(k))));
  return e;
}

GridSpec refine_grid(const GridSpec& g, std::size_t factor) {
  std::array<std::size_t, 3> p{};
  for (int a = 0; a < 3; ++a) p[a] = a < g.dim() ? factor * (g.points(a) - 1) + 1 : 1;
  return GridSpec(g.dim(), g.extents(), p);
}

}  // namespace

ConvergenceReport convergence_study(const Experiment& e, std::size_t base_time_steps) {
  if (!e.solver.source) throw PreconditionError("convergence study needs a manufactured source");
  const ManufacturedSolution& m = *e.solver.source;
  ConvergenceReport rep;
  SolverConfig cfg = e.solver;
  cfg.diagnostics.gamma_order = 0;
  cfg.diagnostics.modified_energy = false;
  cfg.diagnostics.probes = false;
  cfg.record_every = 1u << 30;

  for (std::size_t f : {1u, 2u, 4u}) {
    const GridSpec g = refine_grid(e.grid, f);
    const RunOutcome out = run(m.exact_state(g, 0.0), cfg, 0.0);
    rep.spacings.push_back(g.min_spacing());
    rep.space_errors.push_back(max_error(out.final_state, m));
  }
  for (std::size_t i = 1; i < rep.space_errors.size(); ++i)
    rep.space_orders.push_back(std::log2(rep.space_errors[i - 1] / rep.space_errors[i]));

  const GridSpec g = refine_grid(e.grid, 2);
  std::size_t n0 = base_time_steps;
  if (n0 == 0) n0 = static_cast<std::size_t>(std::ceil(cfg.t_final / cfl_dt(g, cfg.constants, cfg.cfl_safety)));
  std::vector<State> finals;
  for (std::size_t f : {1u, 2u, 4u}) {
    SolverConfig c = cfg;
    c.fixed_steps = n0 * f;
    const RunOutcome out = run(m.exact_state(g, 0.0), c, 0.0);
    rep.time_steps.push_back(cfg.t_final / static_cast<double>(c.fixed_steps));
    finals.push_back(out.final_state);
  }
  for (std::size_t i = 1; i < finals.size(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) d = std::max(d, std::abs(finals[i].u[k] - finals[i - 1].u[k]));
    rep.time_differences.push_back(d);
  }
  rep.time_order = std::log2(rep.time_differences[0] / rep.time_differences[1]);
  return rep;
}

}  // namespace nematowave
