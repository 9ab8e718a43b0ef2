#include "nematowave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "nematowave/errors.hpp"
#include "nematowave/kernels.hpp"

namespace nematowave {

const char* to_string(Scheme s) noexcept {
  return s == Scheme::Conservative ? "conservative" : "pointwise";
}

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::Completed:
      return "Completed";
    case RunStatus::BlowupDetected:
      return "BlowupDetected";
    case RunStatus::MarginExhausted:
      return "MarginExhausted";
    case RunStatus::NonFinite:
      return "NonFinite";
  }
  return "?";
}

// ---------------------------------------------------------------- manufactured

double ManufacturedSolution::value(double t, const Vec3& x) const {
  if (kind == Kind::Affine)
    return (affine[0] + affine[1] * x[0] + affine[2] * x[1] + affine[3] * x[2]) * (time_poly[0] + time_poly[1] * t);
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  return amplitude * std::cos(omega * t) * std::exp(-r2 / (width * width));
}

double ManufacturedSolution::dt(double t, const Vec3& x) const {
  if (kind == Kind::Affine) return (affine[0] + affine[1] * x[0] + affine[2] * x[1] + affine[3] * x[2]) * time_poly[1];
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  return -amplitude * omega * std::sin(omega * t) * std::exp(-r2 / (width * width));
}

double ManufacturedSolution::dtt(double t, const Vec3& x) const {
  if (kind == Kind::Affine) return 0.0;
  return -omega * omega * value(t, x);
}

Vec3 ManufacturedSolution::gradient(double t, const Vec3& x) const {
  if (kind == Kind::Affine) {
    const double p = time_poly[0] + time_poly[1] * t;
    return {affine[1] * p, affine[2] * p, affine[3] * p};
  }
  const double u = value(t, x);
  const double k = -2.0 / (width * width);
  return {k * x[0] * u, k * x[1] * u, k * x[2] * u};
}

Mat3 ManufacturedSolution::hessian(double t, const Vec3& x) const {
  Mat3 h{};
  if (kind == Kind::Affine) return h;
  const double u = value(t, x);
  const double w2 = width * width;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = (4.0 * x[i] * x[j] / (w2 * w2) - (i == j ? 2.0 / w2 : 0.0)) * u;
  return h;
}

double ManufacturedSolution::source(const ElasticConstants& c, int dim, double t, const Vec3& x) const {
  const double u = value(t, x);
  Vec3 g = gradient(t, x);
  const Mat3 h = hessian(t, x);
  for (int a = dim; a < 3; ++a) g[a] = 0.0;
  const auto p = principal_matrix(c, u);
  double lin = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) lin += p(i, j) * h[i][j];
  return dtt(t, x) - lin - forcing(c, u, g[0], g[1]);
}

State ManufacturedSolution::exact_state(const GridSpec& spec, double t) const {
  State s(spec, t);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto x = spec.position(k);
    s.u[k] = value(t, x);
    s.v[k] = dt(t, x);
  }
  return s;
}

// ---------------------------------------------------------------- config

void SolverConfig::validate() const {
  constants.validate();
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw PreconditionError("cfl_safety must lie in (0, 1]");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw PreconditionError("t_final must be positive");
  if (record_every < 1) throw PreconditionError("record_every must be at least 1");
  if (!(blowup_gradient_factor > 1.0)) throw PreconditionError("blowup_gradient_factor must exceed 1");
  if (!(blowup_absolute_cap > 0.0)) throw PreconditionError("blowup_absolute_cap must be positive");
  if (diagnostics.gamma_order < 0 || diagnostics.gamma_order > 2)
    throw PreconditionError("diagnostics gamma_order must be 0, 1 or 2");
  if (diagnostics.modified_order < 0 || diagnostics.modified_order > 1)
    throw PreconditionError("diagnostics modified_order must be 0 or 1");
}

double cfl_dt(const GridSpec& spec, const ElasticConstants& c, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw PreconditionError("cfl safety must lie in (0, 1]");
  return safety * spec.min_spacing() / (c.max_speed() * std::sqrt(static_cast<double>(spec.dim())));
}

// ---------------------------------------------------------------- integrator

namespace detail {

namespace {

constexpr std::size_t kChunk = 8192;

// Element-wise op over [begin, end) split into fixed chunks; each output
// element depends only on its own inputs, so the split never changes bits.
template <class F>
void for_chunks(std::size_t begin, std::size_t end, F&& f) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const auto chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const std::size_t b = begin + static_cast<std::size_t>(c) * kChunk;
    f(b, std::min(end, b + kChunk));
  }
}

// How far (in x1 slabs) one RK4 step can spread nonzero values, plus slack.
constexpr std::size_t kWindowPad = 4;

}  // namespace

Integrator::Integrator(const GridSpec& spec, const SolverConfig& config)
    : spec_(spec),
      cfg_(config),
      track_(!config.source.has_value() && config.scheme == Scheme::Conservative),
      last_hi_(spec.points(0)) {
  const std::size_t n = spec.size();
  for (auto* v : {&us_, &vs_, &acc_, &su_, &sv_}) v->assign(n, 0.0);
  if (cfg_.scheme == Scheme::Conservative)
    for (auto* v : {&a11_, &a22_, &a12_, &s2_, &c2_}) v->assign(n, 0.0);
  if (cfg_.source) {
    positions_.resize(n);
    for (std::size_t k = 0; k < n; ++k) positions_[k] = spec.position(k);
  }
}

void Integrator::update_coefficients(const double* u, std::size_t lo, std::size_t hi) {
  const ElasticConstants& c = cfg_.constants;
  const double m = 0.5 * (c.alpha + c.gamma);
  const double d = 0.5 * (c.gamma - c.alpha);
  const std::size_t S = spec_.slab_size();
  const bool frozen = cfg_.freeze_coefficients;
  for_chunks(lo * S, hi * S, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      double s2 = 0.0, c2 = 1.0;
      if (!frozen) {
        s2 = std::sin(2.0 * u[k]);
        c2 = std::cos(2.0 * u[k]);
      }
      s2_[k] = s2;
      c2_[k] = c2;
      a11_[k] = m + d * c2;
      a22_[k] = m - d * c2;
      a12_[k] = d * s2;
    }
  });
}

void Integrator::conservative(const double* u, std::size_t lo, std::size_t hi, double* out) {
  const int dim = spec_.dim();
  const std::size_t n1 = spec_.points(0), n2 = spec_.points(1), n3 = spec_.points(2);
  const std::size_t S = spec_.slab_size();
  update_coefficients(u, lo == 0 ? 0 : lo - 1, std::min(n1, hi + 1));

  const ElasticConstants& c = cfg_.constants;
  kernels::ConservativeArgs a;
  a.dim = dim;
  a.s1 = static_cast<std::ptrdiff_t>(spec_.stride(0));
  a.s2 = static_cast<std::ptrdiff_t>(spec_.stride(1));
  a.s3 = static_cast<std::ptrdiff_t>(spec_.stride(2));
  const double h1 = spec_.spacing(0), h2 = spec_.spacing(1), h3 = spec_.spacing(2);
  a.k1 = 0.5 / (h1 * h1);
  a.ih1 = 1.0 / h1;
  a.hh1 = 0.5 / h1;
  if (dim >= 2) {
    a.k2 = 0.5 / (h2 * h2);
    a.ih2 = 1.0 / h2;
    a.hh2 = 0.5 / h2;
    a.kx = 1.0 / (4.0 * h1 * h2);
  }
  if (dim >= 3) a.k3 = 0.5 / (h3 * h3);
  a.beta2 = c.beta + c.beta;
  a.half_amg = cfg_.freeze_coefficients ? 0.0 : 0.5 * (c.alpha - c.gamma);
  a.amg = cfg_.freeze_coefficients ? 0.0 : c.alpha - c.gamma;
  a.u = u;
  a.a11 = a11_.data();
  a.a22 = a22_.data();
  a.a12 = a12_.data();
  a.s2u = s2_.data();
  a.c2u = c2_.data();
  a.acc = out;
  const auto line = kernels::active().conservative_line;

  // Dirichlet slabs.
  if (lo == 0) std::fill(out, out + S, 0.0);
  if (hi == n1) std::fill(out + (n1 - 1) * S, out + n1 * S, 0.0);
  const std::size_t ilo = std::max<std::size_t>(lo, 1), ihi = std::min(hi, n1 - 1);
  if (ihi <= ilo) return;

  if (dim == 1) {
    for_chunks(ilo, ihi, [&](std::size_t b, std::size_t e) { line(a, b, e); });
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = static_cast<std::ptrdiff_t>(ilo); si < static_cast<std::ptrdiff_t>(ihi); ++si) {
    const auto i1 = static_cast<std::size_t>(si);
    double* slab = out + i1 * S;
    if (dim == 2) {
      slab[0] = 0.0;
      slab[n2 - 1] = 0.0;
      line(a, i1 * S + 1, i1 * S + n2 - 1);
    } else {
      std::fill(slab, slab + n3, 0.0);
      std::fill(slab + (n2 - 1) * n3, slab + n2 * n3, 0.0);
      for (std::size_t i2 = 1; i2 + 1 < n2; ++i2) {
        const std::size_t base = i1 * S + i2 * n3;
        out[base] = 0.0;
        out[base + n3 - 1] = 0.0;
        line(a, base + 1, base + n3 - 1);
      }
    }
  }
}

void Integrator::pointwise(const double* u, double* out) {
  const ElasticConstants& c = cfg_.constants;
  const int dim = spec_.dim();
  ScalarField f(spec_);
  std::memcpy(f.data(), u, spec_.size() * sizeof(double));
  std::array<ScalarField, 3> d1;
  std::array<std::array<ScalarField, 3>, 3> d2;
  for (int i = 0; i < dim; ++i) {
    d1[i] = partial(f, i + 1);
    for (int j = i; j < dim; ++j) d2[i][j] = second_partial(f, i + 1, j + 1);
  }
  const auto frozen = principal_matrix(c, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t sk = 0; sk < static_cast<std::ptrdiff_t>(spec_.size()); ++sk) {
    const auto k = static_cast<std::size_t>(sk);
    if (spec_.is_boundary(k)) {
      out[k] = 0.0;
      continue;
    }
    const auto p = cfg_.freeze_coefficients ? frozen : principal_matrix(c, u[k]);
    double r = 0.0;
    for (int i = 0; i < dim; ++i) {
      r += p(i, i) * d2[i][i][k];
      for (int j = i + 1; j < dim; ++j) r += 2.0 * p(i, j) * d2[i][j][k];
    }
    if (!cfg_.freeze_coefficients) r += forcing(c, u[k], d1[0][k], dim >= 2 ? d1[1][k] : 0.0);
    out[k] = r;
  }
}

void Integrator::apply_source(double t, double* out) {
  const ManufacturedSolution& m = *cfg_.source;
  const ElasticConstants& c = cfg_.constants;
  const int dim = spec_.dim();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t sk = 0; sk < static_cast<std::ptrdiff_t>(spec_.size()); ++sk) {
    const auto k = static_cast<std::size_t>(sk);
    if (spec_.is_boundary(k))
      out[k] = m.dtt(t, positions_[k]);
    else
      out[k] += m.source(c, dim, t, positions_[k]);
  }
}

void Integrator::evaluate(const State& s, const double* u, double t, double* out) {
  (void)s;
  if (cfg_.scheme == Scheme::Conservative)
    conservative(u, 0, spec_.points(0), out);
  else
    pointwise(u, out);
  if (cfg_.source) apply_source(t, out);
}

void Integrator::scan_nonzero(const State& s, std::size_t lo, std::size_t hi) {
  const std::size_t S = spec_.slab_size();
  const double* u = s.u.data();
  const double* v = s.v.data();
  auto nonzero = [&](std::size_t i1) {
    for (std::size_t k = i1 * S; k < (i1 + 1) * S; ++k)
      if (u[k] != 0.0 || v[k] != 0.0) return true;
    return false;
  };
  std::size_t a = lo;
  while (a < hi && !nonzero(a)) ++a;
  if (a == hi) {
    nz_lo_ = nz_hi_ = 0;
    return;
  }
  std::size_t b = hi;
  while (b > a && !nonzero(b - 1)) --b;
  nz_lo_ = a;
  nz_hi_ = b;
}

void Integrator::step(State& s, double dt) {
  const std::size_t n1 = spec_.points(0), S = spec_.slab_size();
  std::size_t lo = 0, hi = n1;
  if (track_) {
    if (!window_valid_) {
      scan_nonzero(s, 0, n1);
      window_valid_ = true;
    }
    if (nz_lo_ == nz_hi_) {
      last_lo_ = last_hi_ = 0;
      s.t += dt;
      return;
    }
    lo = nz_lo_ > kWindowPad ? nz_lo_ - kWindowPad : 0;
    hi = std::min(n1, nz_hi_ + kWindowPad);
  }
  last_lo_ = lo;
  last_hi_ = hi;
  const std::size_t b = lo * S, e = hi * S;
  const auto& K = kernels::active();
  double* u = s.u.data();
  double* v = s.v.data();
  double* us = us_.data();
  double* vs = vs_.data();
  double* acc = acc_.data();
  double* su = su_.data();
  double* sv = sv_.data();
  const double t0 = s.t;

  // Stage values next to the window are read by the stencil and must be zero.
  if (lo > 0) std::fill(us + (lo - 1) * S, us + lo * S, 0.0);
  if (hi < n1) std::fill(us + hi * S, us + (hi + 1) * S, 0.0);

  auto accel = [&](const double* x, double t) {
    if (cfg_.scheme == Scheme::Conservative) {
      conservative(x, lo, hi, acc);
    } else {
      pointwise(x, acc);
    }
    if (cfg_.source) apply_source(t, acc);
  };
  const double h = 0.5 * dt;

  accel(u, t0);
  for_chunks(b, e, [&](std::size_t i, std::size_t j) {
    std::memcpy(su + i, v + i, (j - i) * sizeof(double));
    std::memcpy(sv + i, acc + i, (j - i) * sizeof(double));
    K.axpy(j - i, h, u + i, v + i, us + i);
    K.axpy(j - i, h, v + i, acc + i, vs + i);
  });
  accel(us, t0 + h);
  for_chunks(b, e, [&](std::size_t i, std::size_t j) {
    K.accumulate(j - i, 2.0, vs + i, su + i);
    K.accumulate(j - i, 2.0, acc + i, sv + i);
    K.axpy(j - i, h, u + i, vs + i, us + i);
    K.axpy(j - i, h, v + i, acc + i, vs + i);
  });
  accel(us, t0 + h);
  for_chunks(b, e, [&](std::size_t i, std::size_t j) {
    K.accumulate(j - i, 2.0, vs + i, su + i);
    K.accumulate(j - i, 2.0, acc + i, sv + i);
    K.axpy(j - i, dt, u + i, vs + i, us + i);
    K.axpy(j - i, dt, v + i, acc + i, vs + i);
  });
  accel(us, t0 + dt);
  const double w = dt / 6.0;
  for_chunks(b, e, [&](std::size_t i, std::size_t j) {
    K.accumulate(j - i, 1.0, vs + i, su + i);
    K.accumulate(j - i, 1.0, acc + i, sv + i);
    K.accumulate(j - i, w, su + i, u + i);
    K.accumulate(j - i, w, sv + i, v + i);
  });
  s.t = t0 + dt;
  if (track_) scan_nonzero(s, lo, hi);
}

}  // namespace detail

// ---------------------------------------------------------------- public API

ScalarField acceleration(const State& s, const SolverConfig& config) {
  detail::Integrator in(s.spec(), config);
  ScalarField out(s.spec());
  in.evaluate(s, s.u.data(), s.t, out.data());
  if (!out.all_finite()) throw NonFiniteError("acceleration produced a non-finite value");
  return out;
}

State step_rk4(const State& s, double dt, const SolverConfig& config) {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw PreconditionError("step_rk4 needs a finite nonzero dt");
  detail::Integrator in(s.spec(), config);
  State out = s;
  in.step(out, dt);
  if (!out.u.all_finite() || !out.v.all_finite()) throw NonFiniteError("RK4 step produced a non-finite value");
  return out;
}

namespace {

// max(|d_i u|, |v|) over x1 slabs [lo, hi), grid stencils; NaN propagates.
double grad_max_slabs(const State& s, std::size_t lo, std::size_t hi) {
  const GridSpec& g = s.spec();
  const int dim = g.dim();
  const std::size_t S = g.slab_size();
  double m = 0.0;
  bool bad = false;
  for (std::size_t k = lo * S; k < hi * S; ++k) {
    const double vk = std::abs(s.v[k]);
    if (!(vk <= m)) {
      if (std::isnan(vk)) bad = true;
      m = std::max(m, vk);
    }
    const auto mi = g.multi_index(k);
    for (int a = 0; a < dim; ++a) {
      const std::size_t n = g.points(a), i = mi[a];
      const std::size_t st = g.stride(a);
      const double ih = 1.0 / g.spacing(a);
      double d;
      if (i == 0)
        d = (-1.5 * s.u[k] + 2.0 * s.u[k + st] - 0.5 * s.u[k + 2 * st]) * ih;
      else if (i + 1 == n)
        d = (1.5 * s.u[k] - 2.0 * s.u[k - st] + 0.5 * s.u[k - 2 * st]) * ih;
      else
        d = (0.5 * s.u[k + st] - 0.5 * s.u[k - st]) * ih;
      d = std::abs(d);
      if (std::isnan(d)) bad = true;
      m = std::max(m, d);
    }
  }
  return bad ? std::numeric_limits<double>::quiet_NaN() : m;
}

bool finite_slabs(const State& s, std::size_t lo, std::size_t hi) {
  const std::size_t S = s.spec().slab_size();
  for (std::size_t k = lo * S; k < hi * S; ++k)
    if (!std::isfinite(s.u[k]) || !std::isfinite(s.v[k])) return false;
  return true;
}

RunStatus classify(double g, double g0, const SolverConfig& c) {
  if (!std::isfinite(g)) return RunStatus::NonFinite;
  if (g0 > 0.0 && g >= c.blowup_gradient_factor * g0) return RunStatus::BlowupDetected;
  if (g >= c.blowup_absolute_cap) return RunStatus::BlowupDetected;
  return RunStatus::Completed;
}

}  // namespace

double grad_max(const State& s) { return grad_max_slabs(s, 0, s.spec().points(0)); }

RunStatus detect_blowup(const State& s, double initial_grad_max, const SolverConfig& config) {
  if (!s.u.all_finite() || !s.v.all_finite()) return RunStatus::NonFinite;
  return classify(grad_max(s), initial_grad_max, config);
}

namespace {

bool needs_neighbours(const SolverConfig& cfg) {
  const auto& o = cfg.diagnostics;
  return o.gamma_order >= 2 || o.probes ||
         (o.modified_energy && o.modified_order >= 1 && cfg.constants.alpha <= cfg.constants.gamma);
}

}  // namespace

RunOutcome run(const State& initial, const SolverConfig& config, double support_radius) {
  config.validate();
  const GridSpec& spec = initial.spec();
  if (!(initial.v.spec == spec)) throw PreconditionError("u and v must share one grid");
  if (!initial.u.all_finite() || !initial.v.all_finite())
    throw PreconditionError("initial data contains non-finite values");
  const bool mms = config.source.has_value();
  if (!mms) {
    if (!(support_radius > 0.0)) throw PreconditionError("support radius must be positive");
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const auto x = spec.position(k);
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      if (r >= support_radius && (std::abs(initial.u[k]) > 1e-12 || std::abs(initial.v[k]) > 1e-12)) {
        std::ostringstream os;
        os << "initial data is not supported in |x| < " << support_radius << " (nonzero at |x| = " << r << ")";
        throw PreconditionError(os.str());
      }
    }
  }

  const double duration = config.t_final - initial.t;
  std::size_t nsteps = config.fixed_steps;
  if (nsteps == 0 && duration > 0.0)
    nsteps = static_cast<std::size_t>(std::ceil(duration / cfl_dt(spec, config.constants, config.cfl_safety) - 1e-12));
  const double dt = nsteps > 0 ? duration / static_cast<double>(nsteps) : 0.0;

  RunOutcome out;
  out.dt = dt;
  out.final_state = initial;
  State& s = out.final_state;
  const std::size_t n1 = spec.points(0);
  out.initial_grad_max = grad_max(initial);
  out.peak_grad_max = out.initial_grad_max;
  const double t0 = initial.t;
  double min_extent = spec.extent(0);
  for (int a = 1; a < spec.dim(); ++a) min_extent = std::min(min_extent, spec.extent(a));

  const bool lagged = needs_neighbours(config);
  History window;  // last recorded states, at most three
  auto record = [&](std::size_t lo, std::size_t hi, double g) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.components = energy_totals(s, config.constants, lo, hi);
    r.total_energy = r.components.total();
    r.grad_max = g;
    window.push_back(s);
    if (window.size() > 3) window.erase(window.begin());
    fill_history_fields(r, window, window.size() - 1, config.constants, config.diagnostics);
    if (lagged && window.size() == 3 && !out.diagnostics.empty())
      fill_history_fields(out.diagnostics.back(), window, 1, config.constants, config.diagnostics);
    out.diagnostics.push_back(r);
    if (config.keep_history) out.history.push_back(s);
    if (config.on_record) config.on_record(s, out.diagnostics.size() - 1);
  };
  record(0, n1, out.initial_grad_max);

  detail::Integrator integ(spec, config);
  for (std::size_t n = 1; n <= nsteps; ++n) {
    const double t_next = t0 + static_cast<double>(n) * dt;
    if (!mms && min_extent - (support_radius + t_next * config.constants.max_speed()) < 0.0) {
      out.status = RunStatus::MarginExhausted;
      if (out.diagnostics.back().t != s.t) record(0, n1, grad_max(s));
      break;
    }
    integ.step(s, dt);
    s.t = t_next;
    out.steps = n;
    const auto [lo, hi] = integ.last_slabs();
    double g = finite_slabs(s, lo, hi) ? grad_max_slabs(s, lo, hi) : std::numeric_limits<double>::quiet_NaN();
    const RunStatus st = classify(g, out.initial_grad_max, config);
    if (std::isfinite(g)) out.peak_grad_max = std::max(out.peak_grad_max, g);
    if (st != RunStatus::Completed) {
      out.status = st;
      if (st == RunStatus::BlowupDetected) record(lo, hi, g);
      break;
    }
    if (n % config.record_every == 0 || n == nsteps) record(lo, hi, g);
  }
  out.t_end = s.t;
  return out;
}

}  // namespace nematowave
