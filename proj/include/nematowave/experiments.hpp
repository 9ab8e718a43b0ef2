#pragma once

// Scripted experiments: initial data families, lifespan scans, the 1-D
// gradient blowup demonstration and manufactured-solution convergence.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nematowave/grid.hpp"
#include "nematowave/solver.hpp"

namespace nematowave {

/// Largest slope of the unit bump exp(1 - 1/(1 - r^2)), about 2.1704.
double bump_max_slope();

struct InitialDataFamily {
  enum class Profile { Bump, SteepBump, Custom };
  enum class Velocity { Zero, RightMoving };

  Profile profile = Profile::Bump;
  std::string custom_path;  // snapshot, Custom only
  double amplitude = 0.05;
  double support_radius = 1.0;
  /// SteepBump: max |d1 u| = amplitude * steepness / support_radius once
  /// steepness exceeds bump_max_slope(); below that the plain bump is used.
  double steepness = 1.0;
  /// RightMoving sets v = -c1(u) d1 u, so the pulse travels towards +x1.
  Velocity velocity = Velocity::Zero;

  void validate() const;
  /// Compression factor applied to x1 inside the bump.
  double x1_scale() const noexcept;
};

const char* to_string(InitialDataFamily::Profile p) noexcept;
const char* to_string(InitialDataFamily::Velocity v) noexcept;

/// Samples the family on the grid. Throws PreconditionError when the support
/// does not fit strictly inside the grid.
State make_initial(const InitialDataFamily& family, const GridSpec& spec, const ElasticConstants& c);

/// Everything one run needs.
struct Experiment {
  GridSpec grid;
  InitialDataFamily family;
  SolverConfig solver;
};

std::string describe(const GridSpec& g);

struct LifespanRow {
  double amplitude = 0.0;
  std::string grid;
  double t_num = 0.0;
  RunStatus status = RunStatus::Completed;
  bool censored = false;
  double initial_grad_max = 0.0;
  double peak_grad_max = 0.0;
};

struct LifespanTable {
  std::vector<LifespanRow> rows;  // amplitude descending
  /// Least-squares slope of log T_num against 1/amplitude over non-censored
  /// rows; empty with fewer than two such rows.
  std::optional<double> slope;
  std::optional<double> intercept;

  bool nonincreasing() const;
};

/// Runs `base` once per amplitude (same grid and integrator settings).
/// `on_run` (optional) sees each outcome, e.g. for writing files.
LifespanTable lifespan_scan(const std::vector<double>& amplitudes, const Experiment& base,
                            const std::function<void(const LifespanRow&, const RunOutcome&)>& on_run = {});

struct BlowupReport {
  RunOutcome main;
  RunOutcome control;  // alpha = gamma, otherwise identical
  double pre_detection_drift = 0.0;
  std::vector<std::pair<double, double>> gradient_series;  // (t, grad_max)
  std::optional<RunOutcome> refined;                      // h/2
  std::optional<double> refinement_shift;                 // |T(h/2) - T(h)| / T(h)

  bool detected() const { return main.status == RunStatus::BlowupDetected; }
  bool control_completed() const { return control.status == RunStatus::Completed; }
};

/// 1-D run with small amplitude and O(1) gradient plus its alpha = gamma
/// control. Requires alpha != gamma and dim == 1.
BlowupReport blowup_demo_1d(const Experiment& e, bool refine = false);

struct ConvergenceReport {
  std::vector<double> spacings;
  std::vector<double> space_errors;  // max |u - u*| at t_final
  std::vector<double> space_orders;
  std::vector<double> time_steps;
  std::vector<double> time_differences;  // max |u_dt - u_dt/2|
  double time_order = 0.0;
};

/// Manufactured-solution study: grids h, h/2, h/4 (dt tied to h through the
/// CFL number) for the spatial order, then dt, dt/2, dt/4 self-convergence on
/// the middle grid for the temporal order. `e.solver.source` must be set.
ConvergenceReport convergence_study(const Experiment& e, std::size_t base_time_steps = 0);

}  // namespace nematowave
