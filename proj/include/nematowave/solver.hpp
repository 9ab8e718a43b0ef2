#pragma once

// Method-of-lines integration of
//   u_tt = sum_ij a_ij(u) d_i d_j u + F(u, du) [+ manufactured source]
// as the first-order system (u, v) with classical RK4.
//
// Two spatial discretisations are available:
//   Conservative  gradient of a discrete energy built from averaged one-sided
//                 differences; the semi-discrete flow conserves that energy.
//   Pointwise     sum a_ij * second_partial + F from the grid stencils.
// Both are second order. Boundary nodes are held by zero Dirichlet
// conditions (or by the exact solution when a manufactured source is on).

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "nematowave/diagnostics.hpp"
#include "nematowave/grid.hpp"
#include "nematowave/model.hpp"

namespace nematowave {

enum class Scheme { Conservative, Pointwise };
enum class RunStatus { Completed, BlowupDetected, MarginExhausted, NonFinite };

const char* to_string(Scheme s) noexcept;
const char* to_string(RunStatus s) noexcept;

/// Closed-form solution u*(t, x) used to build a forcing term that makes it
/// an exact solution of the continuous equation.
struct ManufacturedSolution {
  enum class Kind {
    Gaussian,  // amplitude * cos(omega t) * exp(-|x|^2 / width^2)
    Affine,    // (a0 + a . x) * (b0 + b1 t)
  };
  Kind kind = Kind::Gaussian;
  double amplitude = 0.2;
  double omega = 1.0;
  double width = 1.0;
  std::array<double, 4> affine{0.1, 0.05, -0.03, 0.02};  // a0, a1, a2, a3
  std::array<double, 2> time_poly{1.0, 0.5};              // b0, b1

  double value(double t, const Vec3& x) const;
  double dt(double t, const Vec3& x) const;
  double dtt(double t, const Vec3& x) const;
  Vec3 gradient(double t, const Vec3& x) const;
  Mat3 hessian(double t, const Vec3& x) const;

  /// u*_tt - sum a_ij(u*) d_i d_j u* - F(u*, du*), restricted to `dim` axes.
  double source(const ElasticConstants& c, int dim, double t, const Vec3& x) const;

  State exact_state(const GridSpec& spec, double t) const;
};

struct SolverConfig {
  ElasticConstants constants;
  double cfl_safety = 0.4;
  double t_final = 1.0;
  std::size_t record_every = 1;
  double blowup_gradient_factor = 100.0;
  double blowup_absolute_cap = 1e6;
  Scheme scheme = Scheme::Conservative;
  /// Freeze a_ij and F at their u = 0 values (linear anisotropic wave
  /// equation). Only meaningful for comparisons.
  bool freeze_coefficients = false;
  std::optional<ManufacturedSolution> source;
  DiagnosticsOptions diagnostics;
  /// Explicit step count; 0 means ceil(t_final / cfl_dt).
  std::size_t fixed_steps = 0;
  /// Keep every recorded state in RunOutcome::history.
  bool keep_history = false;
  /// Called with each recorded state and its record index.
  std::function<void(const State&, std::size_t)> on_record;

  void validate() const;
};

struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  double initial_grad_max = 0.0;
  double peak_grad_max = 0.0;
  State final_state;
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<State> history;
};

/// Semi-discrete right-hand side for v.
ScalarField acceleration(const State& s, const SolverConfig& config);

/// safety * h_min / (sqrt(max constant) * sqrt(dim)).
double cfl_dt(const GridSpec& spec, const ElasticConstants& c, double safety);

/// One RK4 step of size dt. A negative dt integrates backwards in time.
State step_rk4(const State& s, double dt, const SolverConfig& config);

/// max over the grid of |d_i u| (grid stencils) and |v|.
double grad_max(const State& s);

/// Threshold is inclusive. NaN/Inf anywhere gives NonFinite.
RunStatus detect_blowup(const State& s, double initial_grad_max, const SolverConfig& config);

/// Integrates from `initial` until t_final or a stop condition. The initial
/// data must vanish (|u|, |v| <= 1e-12) outside |x| < support_radius; the
/// check and the margin test are skipped when a manufactured source is on.
RunOutcome run(const State& initial, const SolverConfig& config, double support_radius);

namespace detail {

/// Stateful integrator reusing its work arrays between steps. Tracks the
/// range of x1 slabs where u or v is nonzero and restricts work to it.
class Integrator {
 public:
  Integrator(const GridSpec& spec, const SolverConfig& config);

  void step(State& s, double dt);
  void evaluate(const State& s, const double* u, double t, double* out);
  void reset_window() { window_valid_ = false; }

  /// x1 slab range [lo, hi) touched by the last step; values outside it are
  /// zero when tracking is on.
  std::array<std::size_t, 2> last_slabs() const noexcept { return {last_lo_, last_hi_}; }
  bool tracking() const noexcept { return track_; }

 private:
  void update_coefficients(const double* u, std::size_t lo, std::size_t hi);
  void conservative(const double* u, std::size_t lo, std::size_t hi, double* out);
  void pointwise(const double* u, double* out);
  void apply_source(double t, double* out);
  void scan_nonzero(const State& s, std::size_t lo, std::size_t hi);

  GridSpec spec_;
  SolverConfig cfg_;
  bool track_;
  bool window_valid_ = false;
  std::size_t nz_lo_ = 0, nz_hi_ = 0;
  std::size_t last_lo_ = 0, last_hi_ = 0;
  std::vector<double> a11_, a22_, a12_, s2_, c2_;
  std::vector<double> us_, vs_, acc_, su_, sv_;
  std::vector<Vec3> positions_;
};

}  // namespace detail

}  // namespace nematowave
