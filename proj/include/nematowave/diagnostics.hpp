#pragma once

// Quantities monitored along a run: energies, Klainerman vector fields and
// the norms built from them, commutator checks, the modified energy, two
// empirical inequality probes and a check that the equation is the
// Euler-Lagrange equation of its action.
//
// A "history" is a sequence of States at uniformly spaced times. Time
// derivatives of u are v; time derivatives of purely spatial words applied to
// u are the same words applied to v; anything else uses centered differences
// between neighbouring history entries.

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nematowave/grid.hpp"
#include "nematowave/model.hpp"

namespace nematowave {

struct VectorFieldId {
  enum class Kind { Partial, Rotation, Scaling };
  Kind kind = Kind::Partial;
  int a = 0;  // Partial: axis (0 = time). Rotation: first index.
  int b = 0;  // Rotation: second index, a < b.

  static VectorFieldId partial(int axis);
  static VectorFieldId rotation(int a, int b);
  static VectorFieldId scaling();

  /// True if the field has a d/dt component.
  bool involves_time() const noexcept;
  std::string name() const;
  bool operator==(const VectorFieldId&) const = default;
};

/// d/dt, d_i, Omega_ab (a < b, index 0 = time) and L, in that order:
/// 4, 7 and 11 generators in 1, 2 and 3 dimensions.
std::vector<VectorFieldId> generators(int dim);

/// A composition of generators; word[0] is applied last (outermost).
using Word = std::vector<VectorFieldId>;

/// All ordered words of length <= n, shortest first, lexicographic in
/// generator order within a length. The empty word comes first.
std::vector<Word> words_up_to(int dim, int n);

using History = std::vector<State>;

/// Applies one generator to u at history[index].
ScalarField apply_vector_field(const History& h, std::size_t index, const VectorFieldId& id);
ScalarField apply_word(const History& h, std::size_t index, const Word& word);
/// d/dt of apply_word(h, index, word).
ScalarField time_derivative(const History& h, std::size_t index, const Word& word);

struct GammaNormSpec {
  int order_n = 0;
  double p = 2.0;  // 1, 2 or infinity
};

/// Discrete L^p norm with cell-volume weights; p = infinity gives the max.
double lp_norm(const ScalarField& f, double p);

/// Sum over words of length <= N of the L^p norm of the word applied to u.
double gamma_norm(const History& h, std::size_t index, const GammaNormSpec& spec);

using SpaceTimeFunction = std::function<double(double t, const Vec3& x)>;

/// Max over interior nodes of |[box, Gamma] f - expected| with box = d_t^2 - Laplacian,
/// expected = 2 box f for the scaling field and 0 otherwise. f is sampled
/// at t0 + k dt for k = -2..2.
double commutator_residual(const SpaceTimeFunction& f, const VectorFieldId& id, const GridSpec& spec, double dt,
                           double t0 = 0.0);

/// Sum over words of length k of ||d Gamma^k u||^2 + sum_ij int abar_ij(u) d_i Gamma^k u d_j Gamma^k u.
/// Throws PreconditionError if alpha > gamma or k > 1.
double modified_energy(const History& h, std::size_t index, const ElasticConstants& c, int k_order);

/// ||u||_{Gamma,N,inf} / [(1+t)^{-2/p} (1+|t-|x*||)^{-1/p} ||u||_{Gamma,N',p}] with
/// N' = N + floor(dim/p) + 1 and x* the argmax of the left side's pointwise sum.
/// Empty when the right-hand norm is below 1e-14. Throws when N' > 2 or p is not 1 or 2.
std::optional<double> decay_probe(const History& h, std::size_t index, const GammaNormSpec& spec);

/// ||h d w||_{L2} / (||grad h||_{L2} * sum_{|a|<=1} ||Gamma^a w||_inf), with d w = (w_t, grad w).
/// 0 when the numerator vanishes, empty when only the denominator does.
std::optional<double> product_probe(const ScalarField& hfield, const History& w, std::size_t index);

/// Compares the phi-weighted residual u_tt - sum a_ij d_i d_j u - F of a closed-form
/// field with minus the first variation of the discrete action in the direction of
/// phi, for bump weights phi centred at a few probe points. Returns the max
/// discrepancy over probes.
double el_residual(const SpaceTimeFunction& u, const ElasticConstants& c, const GridSpec& spec, double dt);

/// Integrated energy components (averaged one-sided gradients, cell volume weights).
EnergyDensity energy_totals(const State& s, const ElasticConstants& c);

/// Same, restricted to x1 slabs [lo, hi).
EnergyDensity energy_totals(const State& s, const ElasticConstants& c, std::size_t lo, std::size_t hi);

struct DiagnosticsOptions {
  int gamma_order = 1;         // Gamma-norms recorded for N = 0..gamma_order (<= 2)
  bool modified_energy = true;  // only when alpha <= gamma
  int modified_order = 1;      // k = 0..modified_order (<= 1)
  bool probes = false;         // decay and product probes
};

struct DiagnosticsRecord {
  double t = 0.0;
  double total_energy = 0.0;
  EnergyDensity components;
  double grad_max = 0.0;
  std::array<std::optional<double>, 2> modified_energy{};
  std::array<std::optional<double>, 3> gamma_p2{};
  std::array<std::optional<double>, 3> gamma_pinf{};
  std::optional<double> decay_ratio;
  std::optional<double> product_ratio;
};

/// Fills the history-dependent fields of `rec` for history[index]. Fields that
/// need a neighbour which is missing stay empty.
void fill_history_fields(DiagnosticsRecord& rec, const History& h, std::size_t index, const ElasticConstants& c,
                         const DiagnosticsOptions& opt);

/// Fixed column order, 17 significant digits, empty cells for absent values.
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);
void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& rows);
std::vector<DiagnosticsRecord> read_csv(std::istream& is);

/// "%.17g"
std::string format_double(double x);

}  // namespace nematowave
