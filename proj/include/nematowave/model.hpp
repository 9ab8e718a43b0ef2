#pragma once

// Pointwise algebra of the planar-director wave equation: Frank constants,
// wave speeds, coefficient matrices, the lower-order forcing, energy
// densities and the director itself.
//
// Angles are plain reals and are never wrapped; every formula here is
// 2*pi periodic in u.

#include <array>
#include <cstdint>
#include <cstddef>

namespace nematowave {

/// Frank elastic constants (splay, twist, bend). All strictly positive.
struct ElasticConstants {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  /// Throws PreconditionError naming the first non-positive constant.
  void validate() const;

  double max_constant() const noexcept;
  /// Largest characteristic speed of the wave operator, sqrt(max(alpha, beta, gamma)).
  double max_speed() const noexcept;
  /// c0 = (gamma - alpha) / alpha of the rescaled matrix.
  double rescaled_c0() const noexcept { return (gamma - alpha) / alpha; }
};

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Symmetric 3x3 coefficient matrix.
struct CoefficientMatrix {
  Mat3 entries{};

  double operator()(int i, int j) const noexcept { return entries[i][j]; }
  double trace() const noexcept { return entries[0][0] + entries[1][1] + entries[2][2]; }
  /// Determinant of the top-left 2x2 block.
  double block_determinant() const noexcept {
    return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
  }
  bool is_symmetric() const noexcept;
};

struct Director {
  double n1 = 1.0;
  double n2 = 0.0;
  double n3 = 0.0;

  double norm() const noexcept;
  Vec3 as_array() const noexcept { return {n1, n2, n3}; }
};

inline constexpr double kDirectorUnitTolerance = 1e-8;

/// Energy density split into the kinetic term and the three elastic terms
/// of the planar reduction.
struct EnergyDensity {
  double kinetic = 0.0;
  double splay_like = 0.0;
  double twist_axis = 0.0;
  double bend_like = 0.0;

  double elastic() const noexcept { return splay_like + twist_axis + bend_like; }
  double total() const noexcept { return kinetic + elastic(); }

  EnergyDensity& operator+=(const EnergyDensity& o) noexcept {
    kinetic += o.kinetic;
    splay_like += o.splay_like;
    twist_axis += o.twist_axis;
    bend_like += o.bend_like;
    return *this;
  }
  EnergyDensity& operator*=(double s) noexcept {
    kinetic *= s;
    splay_like *= s;
    twist_axis *= s;
    bend_like *= s;
    return *this;
  }
};

struct WaveSpeeds {
  double c1_sq = 0.0;
  double c2_sq = 0.0;
};

/// c1^2 = alpha sin^2 u + gamma cos^2 u, c2^2 = alpha cos^2 u + gamma sin^2 u.
WaveSpeeds wave_speeds(const ElasticConstants& c, double u) noexcept;

/// The coefficient matrix A(u) exactly as printed alongside the rescaled
/// equation: off-diagonal 1/2 (alpha - gamma) sin 2u, entry (3,3) = beta.
///
/// Its off-diagonal sign disagrees with the mixed term of the wave equation
/// itself; the solver uses principal_matrix() instead. The spectrum of both
/// is {alpha, gamma, beta}.
CoefficientMatrix coefficient_matrix(const ElasticConstants& c, double u) noexcept;

/// Principal coefficients of u_tt = sum a_ij d_i d_j u + F, read off the
/// expanded wave equation (mixed term (gamma - alpha) sin 2u d_1 d_2 u), so
/// the off-diagonal is 1/2 (gamma - alpha) sin 2u. This is the matrix whose
/// quadratic form is twice the elastic energy density.
CoefficientMatrix principal_matrix(const ElasticConstants& c, double u) noexcept;

/// Rescaled semidefinite matrix with c0 = (gamma - alpha)/alpha:
/// [[c0 cos^2 u, c0 sin 2u / 2, 0], [c0 sin 2u / 2, c0 sin^2 u, 0], [0, 0, 0]].
/// Requires alpha <= gamma (PreconditionError otherwise).
CoefficientMatrix rescaled_matrix(const ElasticConstants& c, double u);

/// Direct reduction of coefficient_matrix(): A(u)/alpha - diag(1, 1, beta/alpha).
/// Agrees with rescaled_matrix() on the diagonal and has the opposite
/// off-diagonal sign.
CoefficientMatrix reduced_matrix(const ElasticConstants& c, double u) noexcept;

/// F(u, du) = 1/2 (alpha - gamma) sin 2u (d1u^2 - d2u^2) - (alpha - gamma) cos 2u d1u d2u.
double forcing(const ElasticConstants& c, double u, double d1u, double d2u) noexcept;

/// Planar elastic density plus kinetic term 1/2 ut^2.
EnergyDensity planar_energy_density(const ElasticConstants& c, double u, const Vec3& grad_u,
                                    double ut) noexcept;

/// Oseen-Frank density 1/2 a (div n)^2 + 1/2 b (n . curl n)^2 + 1/2 g |n x curl n|^2.
/// grad_n[i][j] = d n_i / d x_j. Throws PreconditionError when |n| deviates
/// from 1 by more than kDirectorUnitTolerance.
double oseen_frank_density(const ElasticConstants& c, const Director& n, const Mat3& grad_n);

/// n = (cos u, sin u, 0).
Director director_from_angle(double u) noexcept;

/// Gradient of director_from_angle(u) given grad u: d n_i / d x_j.
Mat3 director_gradient(double u, const Vec3& grad_u) noexcept;

/// Results of the sampled identity suite (see verify_algebra()).
struct AlgebraReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double max_spectrum_deviation = 0.0;      // eig A(u) vs {alpha, gamma, beta}
  double max_principal_spectrum_deviation = 0.0;
  double max_determinant_deviation = 0.0;   // det block - alpha*gamma
  double max_trace_deviation = 0.0;         // c1^2 + c2^2 - (alpha + gamma)
  double min_rescaled_eigenvalue = 0.0;     // >= -tol for semidefiniteness
  double max_rescaled_second_eigenvalue = 0.0;  // rank <= 1
  double max_rescaled_trace_deviation = 0.0;
  double max_reduction_deviation = 0.0;     // Oseen-Frank vs planar density
  double max_forcing_parity_deviation = 0.0;
  // Off-diagonal comparison of the printed rescaled matrix with the direct
  // reduction of the printed A(u): same magnitude, opposite sign.
  double max_offdiag_sum = 0.0;         // |Abar_12 + reduced_12|, ~0
  double max_offdiag_difference = 0.0;  // |Abar_12 - reduced_12|, O(c0)
  // principal_matrix()/alpha - diag(1,1,beta/alpha) vs the printed rescaled matrix.
  double max_principal_rescaled_deviation = 0.0;
  double tolerance = 1e-12;

  bool passed() const noexcept;
};

/// Samples (u, alpha, beta, gamma) and checks every pointwise identity of the
/// model. Constants are drawn log-uniformly from [0.1, 10], u uniformly from
/// [-4 pi, 4 pi]. Deterministic for a given seed.
AlgebraReport verify_algebra(std::size_t samples, std::uint64_t seed);

}  // namespace nematowave
