#include "nematowave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nematowave/errors.hpp"

namespace nematowave {

// ---------------------------------------------------------------- generators

VectorFieldId VectorFieldId::partial(int axis) {
  if (axis < 0 || axis > 3) throw PreconditionError("partial axis must be 0..3");
  return {Kind::Partial, axis, 0};
}

VectorFieldId VectorFieldId::rotation(int a, int b) {
  if (a < 0 || b > 3 || a >= b) throw PreconditionError("rotation needs 0 <= a < b <= 3");
  return {Kind::Rotation, a, b};
}

VectorFieldId VectorFieldId::scaling() { return {Kind::Scaling, 0, 0}; }

bool VectorFieldId::involves_time() const noexcept {
  switch (kind) {
    case Kind::Partial:
      return a == 0;
    case Kind::Rotation:
      return a == 0;
    case Kind::Scaling:
      return true;
  }
  return true;
}

std::string VectorFieldId::name() const {
  switch (kind) {
    case Kind::Partial:
      return "d" + std::to_string(a);
    case Kind::Rotation:
      return "O" + std::to_string(a) + std::to_string(b);
    case Kind::Scaling:
      return "L";
  }
  return "?";
}

std::vector<VectorFieldId> generators(int dim) {
  if (dim < 1 || dim > 3) throw PreconditionError("dimension must be 1, 2 or 3");
  std::vector<VectorFieldId> g;
  for (int i = 0; i <= dim; ++i) g.push_back(VectorFieldId::partial(i));
  for (int a = 0; a <= dim; ++a)
    for (int b = a + 1; b <= dim; ++b) g.push_back(VectorFieldId::rotation(a, b));
  g.push_back(VectorFieldId::scaling());
  return g;
}

std::vector<Word> words_up_to(int dim, int n) {
  const auto g = generators(dim);
  std::vector<Word> out{Word{}};
  std::vector<Word> prev{Word{}};
  for (int len = 1; len <= n; ++len) {
    std::vector<Word> next;
    for (const auto& w : prev)
      for (const auto& id : g) {
        Word x = w;
        x.push_back(id);
        next.push_back(std::move(x));
      }
    out.insert(out.end(), next.begin(), next.end());
    prev = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------- application

namespace {

bool spatial_word(const Word& w) {
  return std::none_of(w.begin(), w.end(), [](const VectorFieldId& id) { return id.involves_time(); });
}

void check_generator(const VectorFieldId& id, int dim) {
  const int top = id.kind == VectorFieldId::Kind::Rotation ? id.b : id.a;
  if (top > dim) {
    std::ostringstream os;
    os << "vector field " << id.name() << " does not exist in " << dim << " dimensions";
    throw PreconditionError(os.str());
  }
}

// Applies one generator to w at time t; wt is dw/dt and is only read when the
// generator has a time component.
ScalarField combine(const VectorFieldId& id, const ScalarField& w, const ScalarField* wt, double t) {
  const GridSpec& s = w.spec;
  check_generator(id, s.dim());
  switch (id.kind) {
    case VectorFieldId::Kind::Partial:
      if (id.a == 0) return *wt;
      return partial(w, id.a);
    case VectorFieldId::Kind::Rotation: {
      ScalarField out(s);
      if (id.a == 0) {
        const ScalarField db = partial(w, id.b);
        for (std::size_t k = 0; k < s.size(); ++k) out[k] = t * db[k] + s.position(k)[id.b - 1] * (*wt)[k];
      } else {
        const ScalarField da = partial(w, id.a), db = partial(w, id.b);
        for (std::size_t k = 0; k < s.size(); ++k) {
          const auto x = s.position(k);
          out[k] = x[id.a - 1] * db[k] - x[id.b - 1] * da[k];
        }
      }
      return out;
    }
    case VectorFieldId::Kind::Scaling: {
      ScalarField out(s);
      for (std::size_t k = 0; k < s.size(); ++k) out[k] = t * (*wt)[k];
      for (int i = 1; i <= s.dim(); ++i) {
        const ScalarField di = partial(w, i);
        for (std::size_t k = 0; k < s.size(); ++k) out[k] += s.position(k)[i - 1] * di[k];
      }
      return out;
    }
  }
  return w;
}

ScalarField apply_spatial(const Word& word, const ScalarField& f) {
  ScalarField w = f;
  for (auto it = word.rbegin(); it != word.rend(); ++it) w = combine(*it, w, nullptr, 0.0);
  return w;
}

bool uniform_neighbours(const History& h, std::size_t i) {
  if (i == 0 || i + 1 >= h.size()) return false;
  const double a = h[i].t - h[i - 1].t, b = h[i + 1].t - h[i].t;
  return a > 0.0 && std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

ScalarField time_derivative(const History& h, std::size_t index, const Word& word) {
  if (index >= h.size()) throw PreconditionError("history index out of range");
  if (word.empty()) return h[index].v;
  if (spatial_word(word)) return apply_spatial(word, h[index].v);
  if (!uniform_neighbours(h, index))
    throw PreconditionError("time derivative needs uniformly spaced history on both sides");
  ScalarField plus = apply_word(h, index + 1, word);
  const ScalarField minus = apply_word(h, index - 1, word);
  const double inv = 1.0 / (h[index + 1].t - h[index - 1].t);
  for (std::size_t k = 0; k < plus.size(); ++k) plus[k] = (plus[k] - minus[k]) * inv;
  return plus;
}

ScalarField apply_word(const History& h, std::size_t index, const Word& word) {
  if (index >= h.size()) throw PreconditionError("history index out of range");
  if (word.empty()) return h[index].u;
  const Word rest(word.begin() + 1, word.end());
  const ScalarField w = apply_word(h, index, rest);
  if (word.front().involves_time()) {
    const ScalarField wt = time_derivative(h, index, rest);
    return combine(word.front(), w, &wt, h[index].t);
  }
  return combine(word.front(), w, nullptr, h[index].t);
}

ScalarField apply_vector_field(const History& h, std::size_t index, const VectorFieldId& id) {
  return apply_word(h, index, Word{id});
}

// ---------------------------------------------------------------- norms

double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p)) return f.max_abs();
  if (!(p >= 1.0)) throw PreconditionError("L^p norm needs p >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (double x : f.values) s += x * x;
    return std::sqrt(s * f.spec.cell_volume());
  }
  if (p == 1.0) {
    for (double x : f.values) s += std::abs(x);
    return s * f.spec.cell_volume();
  }
  for (double x : f.values) s += std::pow(std::abs(x), p);
  return std::pow(s * f.spec.cell_volume(), 1.0 / p);
}

namespace {

void check_norm_spec(const GammaNormSpec& g) {
  if (g.order_n < 0 || g.order_n > 2) throw PreconditionError("Gamma-norm order must be 0, 1 or 2");
  if (!(g.p == 1.0 || g.p == 2.0 || std::isinf(g.p))) throw PreconditionError("Gamma-norm p must be 1, 2 or inf");
}

}  // namespace

double gamma_norm(const History& h, std::size_t index, const GammaNormSpec& spec) {
  check_norm_spec(spec);
  if (index >= h.size()) throw PreconditionError("history index out of range");
  double total = 0.0;
  for (const auto& w : words_up_to(h[index].spec().dim(), spec.order_n)) total += lp_norm(apply_word(h, index, w), spec.p);
  return total;
}

// ---------------------------------------------------------------- commutators

double commutator_residual(const SpaceTimeFunction& f, const VectorFieldId& id, const GridSpec& spec, double dt,
                           double t0) {
  if (!(dt > 0.0)) throw PreconditionError("commutator_residual needs dt > 0");
  check_generator(id, spec.dim());
  const int dim = spec.dim();
  std::array<ScalarField, 5> F;
  for (int k = -2; k <= 2; ++k) {
    const double t = t0 + k * dt;
    F[k + 2] = sample(spec, [&](double x1, double x2, double x3) { return f(t, {x1, x2, x3}); });
  }
  auto centered = [&](const ScalarField& a, const ScalarField& b) {
    ScalarField out(spec);
    for (std::size_t k = 0; k < spec.size(); ++k) out[k] = (a[k] - b[k]) / (2.0 * dt);
    return out;
  };
  // box on a three-level stack (levels j-1, j, j+1)
  auto box = [&](const ScalarField& m, const ScalarField& z, const ScalarField& p) {
    ScalarField out(spec);
    for (std::size_t k = 0; k < spec.size(); ++k) out[k] = (p[k] - 2.0 * z[k] + m[k]) / (dt * dt);
    for (int i = 1; i <= dim; ++i) {
      const ScalarField d = second_partial(z, i, i);
      for (std::size_t k = 0; k < spec.size(); ++k) out[k] -= d[k];
    }
    return out;
  };
  std::array<ScalarField, 3> G, B;
  for (int j = -1; j <= 1; ++j) {
    const ScalarField ft = centered(F[j + 3], F[j + 1]);
    G[j + 1] = combine(id, F[j + 2], &ft, t0 + j * dt);
    B[j + 1] = box(F[j + 1], F[j + 2], F[j + 3]);
  }
  const ScalarField lhs = box(G[0], G[1], G[2]);
  const ScalarField bt = centered(B[2], B[0]);
  const ScalarField rhs = combine(id, B[1], &bt, t0);
  const double expect_factor = id.kind == VectorFieldId::Kind::Scaling ? 2.0 : 0.0;

  double worst = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const auto m = spec.multi_index(k);
    bool inner = true;
    for (int a = 0; a < dim; ++a)
      if (m[a] < 2 || m[a] + 3 > spec.points(a)) inner = false;
    if (!inner) continue;
    worst = std::max(worst, std::abs(lhs[k] - rhs[k] - expect_factor * B[1][k]));
  }
  return worst;
}

// ---------------------------------------------------------------- energies

namespace {

struct CellGradients {
  std::array<double, 3> avg{};    // 1/2 (D+^2 + D-^2)
  std::array<double, 3> cent{};   // 1/2 (D+ + D-)
};

// One-sided differences with zero extension outside the grid.
CellGradients cell_gradients(const GridSpec& g, const double* u, std::size_t k, const std::array<std::size_t, 3>& m) {
  CellGradients c;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t st = g.stride(a);
    const double up = m[a] + 1 < g.points(a) ? u[k + st] : 0.0;
    const double um = m[a] > 0 ? u[k - st] : 0.0;
    const double ih = 1.0 / g.spacing(a);
    const double dp = (up - u[k]) * ih, dm = (u[k] - um) * ih;
    c.avg[a] = 0.5 * (dp * dp + dm * dm);
    c.cent[a] = 0.5 * (dp + dm);
  }
  return c;
}

// Elastic density averaged over all one-sided difference choices.
EnergyDensity averaged_elastic(const ElasticConstants& c, double u, const CellGradients& g) {
  const double s = std::sin(u), co = std::cos(u);
  EnergyDensity e;
  const double cross = 2.0 * s * co * g.cent[0] * g.cent[1];
  e.splay_like = 0.5 * c.alpha * (co * co * g.avg[1] + s * s * g.avg[0] - cross);
  e.bend_like = 0.5 * c.gamma * (co * co * g.avg[0] + s * s * g.avg[1] + cross);
  e.twist_axis = 0.5 * c.beta * g.avg[2];
  return e;
}

}  // namespace

EnergyDensity energy_totals(const State& s, const ElasticConstants& c, std::size_t lo, std::size_t hi) {
  const GridSpec& g = s.spec();
  hi = std::min(hi, g.points(0));
  if (hi <= lo) return {};
  const std::size_t S = g.slab_size();
  std::vector<EnergyDensity> partials(hi - lo);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = static_cast<std::ptrdiff_t>(lo); si < static_cast<std::ptrdiff_t>(hi); ++si) {
    EnergyDensity acc;
    const auto i1 = static_cast<std::size_t>(si);
    for (std::size_t k = i1 * S; k < (i1 + 1) * S; ++k) {
      const auto m = g.multi_index(k);
      EnergyDensity e = averaged_elastic(c, s.u[k], cell_gradients(g, s.u.data(), k, m));
      e.kinetic = 0.5 * s.v[k] * s.v[k];
      acc += e;
    }
    partials[i1 - lo] = acc;
  }
  EnergyDensity total;
  for (const auto& p : partials) total += p;
  total *= g.cell_volume();
  return total;
}

EnergyDensity energy_totals(const State& s, const ElasticConstants& c) {
  return energy_totals(s, c, 0, s.spec().points(0));
}

double modified_energy(const History& h, std::size_t index, const ElasticConstants& c, int k_order) {
  if (c.alpha > c.gamma) throw PreconditionError("modified energy needs alpha <= gamma");
  if (k_order < 0 || k_order > 1) throw PreconditionError("modified energy order must be 0 or 1");
  if (index >= h.size()) throw PreconditionError("history index out of range");
  const State& st = h[index];
  const GridSpec& g = st.spec();
  const int dim = g.dim();
  const std::vector<Word> words = k_order == 0 ? std::vector<Word>{Word{}} : [&] {
    std::vector<Word> w;
    for (const auto& id : generators(dim)) w.push_back(Word{id});
    return w;
  }();
  double total = 0.0;
  for (const auto& w : words) {
    const ScalarField f = apply_word(h, index, w);
    const ScalarField ft = time_derivative(h, index, w);
    std::array<ScalarField, 3> d;
    for (int i = 0; i < dim; ++i) d[i] = partial(f, i + 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      double e = ft[k] * ft[k];
      for (int i = 0; i < dim; ++i) e += d[i][k] * d[i][k];
      const auto ab = rescaled_matrix(c, st.u[k]);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) e += ab(i, j) * d[i][k] * d[j][k];
      sum += e;
    }
    total += sum * g.cell_volume();
  }
  return total;
}

// ---------------------------------------------------------------- probes

std::optional<double> decay_probe(const History& h, std::size_t index, const GammaNormSpec& spec) {
  check_norm_spec(spec);
  if (!(spec.p == 1.0 || spec.p == 2.0)) throw PreconditionError("decay probe needs p = 1 or 2");
  if (index >= h.size()) throw PreconditionError("history index out of range");
  const GridSpec& g = h[index].spec();
  const int upper = spec.order_n + static_cast<int>(std::floor(g.dim() / spec.p)) + 1;
  if (upper > 2) throw PreconditionError("decay probe would need Gamma-words longer than 2");

  ScalarField pointwise(g);
  double left = 0.0;
  for (const auto& w : words_up_to(g.dim(), spec.order_n)) {
    const ScalarField f = apply_word(h, index, w);
    left += f.max_abs();
    for (std::size_t k = 0; k < g.size(); ++k) pointwise[k] += std::abs(f[k]);
  }
  const double right_norm = gamma_norm(h, index, {upper, spec.p});
  if (!(right_norm >= 1e-14)) return std::nullopt;
  std::size_t arg = 0;
  for (std::size_t k = 1; k < g.size(); ++k)
    if (pointwise[k] > pointwise[arg]) arg = k;
  const auto x = g.position(arg);
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  const double t = h[index].t;
  const double weight = std::pow(1.0 + std::abs(t - r), -1.0 / spec.p);
  const double decay = std::pow(1.0 + t, -2.0 / spec.p);
  return left / (decay * weight * right_norm);
}

std::optional<double> product_probe(const ScalarField& hf, const History& w, std::size_t index) {
  if (index >= w.size()) throw PreconditionError("history index out of range");
  const State& ws = w[index];
  const GridSpec& g = ws.spec();
  if (!(hf.spec == g)) throw PreconditionError("product probe fields must share one grid");
  const int dim = g.dim();
  std::array<ScalarField, 3> dw, dh;
  for (int i = 0; i < dim; ++i) {
    dw[i] = partial(ws.u, i + 1);
    dh[i] = partial(hf, i + 1);
  }
  double num = 0.0, gh = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double dw2 = ws.v[k] * ws.v[k], dh2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      dw2 += dw[i][k] * dw[i][k];
      dh2 += dh[i][k] * dh[i][k];
    }
    num += hf[k] * hf[k] * dw2;
    gh += dh2;
  }
  if (num == 0.0) return 0.0;
  const double vol = g.cell_volume();
  const double den = std::sqrt(gh * vol) * gamma_norm(w, index, {1, std::numeric_limits<double>::infinity()});
  if (!(den > 0.0)) return std::nullopt;
  return std::sqrt(num * vol) / den;
}

// ---------------------------------------------------------------- Euler-Lagrange

double el_residual(const SpaceTimeFunction& ufun, const ElasticConstants& c, const GridSpec& spec, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("el_residual needs dt > 0");
  c.validate();
  const int dim = spec.dim();
  double e = spec.extent(0);
  for (int a = 1; a < dim; ++a) e = std::min(e, spec.extent(a));
  const double R = 0.3 * e;
  const std::array<Vec3, 3> centres = {Vec3{0.0, 0.0, 0.0}, Vec3{0.25 * e, -0.15 * e, 0.1 * e},
                                       Vec3{-0.2 * e, 0.2 * e, -0.1 * e}};
  const std::array<double, 3> times = {0.3, 0.6, 0.9};
  const int N = static_cast<int>(std::ceil(R / dt)) + 1;
  const double delta = 1e-4;

  double worst = 0.0;
  for (std::size_t q = 0; q < centres.size(); ++q) {
    Vec3 xc = centres[q];
    for (int a = dim; a < 3; ++a) xc[a] = 0.0;
    const double tc = times[q];
    auto phi = [&](double t, const Vec3& x) {
      double r2 = (t - tc) * (t - tc);
      for (int a = 0; a < dim; ++a) r2 += (x[a] - xc[a]) * (x[a] - xc[a]);
      r2 /= R * R;
      return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    };
    // levels n = -N-1 .. N+1 around tc
    const int L = 2 * N + 3;
    std::vector<ScalarField> U(L), P(L);
    for (int n = 0; n < L; ++n) {
      const double t = tc + (n - N - 1) * dt;
      U[n] = sample(spec, [&](double x1, double x2, double x3) { return ufun(t, {x1, x2, x3}); });
      P[n] = sample(spec, [&](double x1, double x2, double x3) { return phi(t, {x1, x2, x3}); });
    }

    // (a) phi-weighted pointwise residual
    double weighted = 0.0, mass = 0.0;
    for (int n = 1; n + 1 < L; ++n) {
      std::array<ScalarField, 3> d1;
      std::array<std::array<ScalarField, 3>, 3> d2;
      for (int i = 0; i < dim; ++i) {
        d1[i] = partial(U[n], i + 1);
        for (int j = i; j < dim; ++j) d2[i][j] = second_partial(U[n], i + 1, j + 1);
      }
      for (std::size_t k = 0; k < spec.size(); ++k) {
        const double w = P[n][k];
        if (w == 0.0) continue;
        const double u = U[n][k];
        const auto A = principal_matrix(c, u);
        double lin = 0.0;
        for (int i = 0; i < dim; ++i) {
          lin += A(i, i) * d2[i][i][k];
          for (int j = i + 1; j < dim; ++j) lin += 2.0 * A(i, j) * d2[i][j][k];
        }
        const double utt = (U[n + 1][k] - 2.0 * u + U[n - 1][k]) / (dt * dt);
        const double res = utt - lin - forcing(c, u, d1[0][k], dim >= 2 ? d1[1][k] : 0.0);
        weighted += w * res;
        mass += w;
      }
    }

    // (b) central difference of the discrete action, summed cell by cell
    auto level = [&](int n, double sgn) {
      ScalarField f = U[n];
      for (std::size_t k = 0; k < spec.size(); ++k) f[k] += sgn * delta * P[n][k];
      return f;
    };
    double dS = 0.0;
    std::vector<ScalarField> Wp(L), Wm(L);
    for (int n = 0; n < L; ++n) {
      Wp[n] = level(n, 1.0);
      Wm[n] = level(n, -1.0);
    }
    for (int n = 0; n < L; ++n) {
      for (std::size_t k = 0; k < spec.size(); ++k) {
        double diff = 0.0;
        if (n + 1 < L) {
          const double vp = (Wp[n + 1][k] - Wp[n][k]) / dt, vm = (Wm[n + 1][k] - Wm[n][k]) / dt;
          diff += 0.5 * (vp * vp - vm * vm);
        }
        const auto m = spec.multi_index(k);
        const double ep = averaged_elastic(c, Wp[n][k], cell_gradients(spec, Wp[n].data(), k, m)).elastic();
        const double em = averaged_elastic(c, Wm[n][k], cell_gradients(spec, Wm[n].data(), k, m)).elastic();
        diff -= ep - em;
        dS += diff;
      }
    }
    const double variation = -dS / (2.0 * delta);
    if (!(mass > 0.0)) throw PreconditionError("el_residual probe does not fit on the grid");
    worst = std::max(worst, std::abs(weighted / mass - variation / mass));
  }
  return worst;
}

// ---------------------------------------------------------------- records

void fill_history_fields(DiagnosticsRecord& rec, const History& h, std::size_t index, const ElasticConstants& c,
                         const DiagnosticsOptions& opt) {
  const bool both = uniform_neighbours(h, index);
  const int dim = h[index].spec().dim();
  const double inf = std::numeric_limits<double>::infinity();

  const int top = std::min(opt.gamma_order, both ? 2 : 1);
  bool need = false;
  for (int n = 0; n <= top; ++n) need = need || !rec.gamma_p2[n] || !rec.gamma_pinf[n];
  if (need) {
    std::array<double, 3> p2{}, pi{};
    for (const auto& w : words_up_to(dim, top)) {
      const ScalarField f = apply_word(h, index, w);
      p2[w.size()] += lp_norm(f, 2.0);
      pi[w.size()] += lp_norm(f, inf);
    }
    double a2 = 0.0, ai = 0.0;
    for (int n = 0; n <= top; ++n) {
      a2 += p2[n];
      ai += pi[n];
      rec.gamma_p2[n] = a2;
      rec.gamma_pinf[n] = ai;
    }
  }

  if (opt.modified_energy && c.alpha <= c.gamma) {
    if (!rec.modified_energy[0]) rec.modified_energy[0] = modified_energy(h, index, c, 0);
    if (opt.modified_order >= 1 && both && !rec.modified_energy[1])
      rec.modified_energy[1] = modified_energy(h, index, c, 1);
  }

  if (opt.probes) {
    const GammaNormSpec ds{0, 2.0};
    const int upper = static_cast<int>(std::floor(dim / 2.0)) + 1;
    if (!rec.decay_ratio && (upper <= 1 || both)) rec.decay_ratio = decay_probe(h, index, ds);
    if (!rec.product_ratio) rec.product_ratio = product_probe(h[index].u, h, index);
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* const kColumns[] = {"t",
                                "total_energy",
                                "kinetic",
                                "splay_like",
                                "twist_axis",
                                "bend_like",
                                "grad_max",
                                "modified_energy_0",
                                "modified_energy_1",
                                "gamma_N0_p2",
                                "gamma_N1_p2",
                                "gamma_N2_p2",
                                "gamma_N0_pinf",
                                "gamma_N1_pinf",
                                "gamma_N2_pinf",
                                "decay_ratio",
                                "product_ratio"};
constexpr std::size_t kNumColumns = sizeof kColumns / sizeof kColumns[0];

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

std::string csv_header() {
  std::string s;
  for (std::size_t i = 0; i < kNumColumns; ++i) {
    if (i) s += ',';
    s += kColumns[i];
  }
  return s;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string s = format_double(r.t);
  for (double x : {r.total_energy, r.components.kinetic, r.components.splay_like, r.components.twist_axis,
                   r.components.bend_like, r.grad_max})
    s += ',' + format_double(x);
  for (const auto& x : r.modified_energy) s += ',' + opt(x);
  for (const auto& x : r.gamma_p2) s += ',' + opt(x);
  for (const auto& x : r.gamma_pinf) s += ',' + opt(x);
  s += ',' + opt(r.decay_ratio);
  s += ',' + opt(r.product_ratio);
  return s;
}

void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& rows) {
  os << csv_header() << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

std::vector<DiagnosticsRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != csv_header()) throw FormatError("diagnostics CSV header mismatch");
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != kNumColumns) throw FormatError("diagnostics CSV line " + std::to_string(lineno) + ": wrong column count");
    std::vector<std::optional<double>> v;
    for (const auto& c : cells) {
      if (c.empty()) {
        v.emplace_back();
        continue;
      }
      char* end = nullptr;
      const double x = std::strtod(c.c_str(), &end);
      if (end != c.c_str() + c.size()) throw FormatError("diagnostics CSV line " + std::to_string(lineno) + ": bad number");
      v.emplace_back(x);
    }
    for (std::size_t i = 0; i < 7; ++i)
      if (!v[i]) throw FormatError("diagnostics CSV line " + std::to_string(lineno) + ": missing required value");
    DiagnosticsRecord r;
    r.t = *v[0];
    r.total_energy = *v[1];
    r.components = {*v[2], *v[3], *v[4], *v[5]};
    r.grad_max = *v[6];
    r.modified_energy = {v[7], v[8]};
    r.gamma_p2 = {v[9], v[10], v[11]};
    r.gamma_pinf = {v[12], v[13], v[14]};
    r.decay_ratio = v[15];
    r.product_ratio = v[16];
    out.push_back(r);
  }
  return out;
}

}  // namespace nematowave
