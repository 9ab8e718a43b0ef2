#include "nematowave/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nematowave/errors.hpp"

namespace nematowave {

void ElasticConstants::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "elastic constant " << name << " must be positive and finite (got " << v << ")";
      throw PreconditionError(os.str());
    }
  };
  check(alpha, "alpha");
  check(beta, "beta");
  check(gamma, "gamma");
}

double ElasticConstants::max_constant() const noexcept { return std::max({alpha, beta, gamma}); }

double ElasticConstants::max_speed() const noexcept { return std::sqrt(max_constant()); }

bool CoefficientMatrix::is_symmetric() const noexcept {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (entries[i][j] != entries[j][i]) return false;
  return true;
}

double Director::norm() const noexcept { return std::sqrt(n1 * n1 + n2 * n2 + n3 * n3); }

WaveSpeeds wave_speeds(const ElasticConstants& c, double u) noexcept {
  const double s = std::sin(u), co = std::cos(u);
  return {c.alpha * s * s + c.gamma * co * co, c.alpha * co * co + c.gamma * s * s};
}

namespace {

CoefficientMatrix block_matrix(double a11, double a12, double a22, double a33) {
  CoefficientMatrix m;
  m.entries[0][0] = a11;
  m.entries[0][1] = a12;
  m.entries[1][0] = a12;
  m.entries[1][1] = a22;
  m.entries[2][2] = a33;
  return m;
}

}  // namespace

CoefficientMatrix coefficient_matrix(const ElasticConstants& c, double u) noexcept {
  const auto w = wave_speeds(c, u);
  return block_matrix(w.c1_sq, 0.5 * (c.alpha - c.gamma) * std::sin(2.0 * u), w.c2_sq, c.beta);
}

CoefficientMatrix principal_matrix(const ElasticConstants& c, double u) noexcept {
  const auto w = wave_speeds(c, u);
  return block_matrix(w.c1_sq, 0.5 * (c.gamma - c.alpha) * std::sin(2.0 * u), w.c2_sq, c.beta);
}

CoefficientMatrix rescaled_matrix(const ElasticConstants& c, double u) {
  if (c.alpha > c.gamma) {
    std::ostringstream os;
    os << "rescaled matrix needs alpha <= gamma (alpha=" << c.alpha << ", gamma=" << c.gamma << ")";
    throw PreconditionError(os.str());
  }
  const double c0 = c.rescaled_c0();
  const double s = std::sin(u), co = std::cos(u);
  return block_matrix(c0 * co * co, 0.5 * c0 * std::sin(2.0 * u), c0 * s * s, 0.0);
}

CoefficientMatrix reduced_matrix(const ElasticConstants& c, double u) noexcept {
  const auto a = coefficient_matrix(c, u);
  CoefficientMatrix r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.entries[i][j] = a.entries[i][j] / c.alpha;
  r.entries[0][0] -= 1.0;
  r.entries[1][1] -= 1.0;
  r.entries[2][2] -= c.beta / c.alpha;
  return r;
}

double forcing(const ElasticConstants& c, double u, double d1u, double d2u) noexcept {
  const double k = c.alpha - c.gamma;
  return 0.5 * k * std::sin(2.0 * u) * (d1u * d1u - d2u * d2u) - k * std::cos(2.0 * u) * d1u * d2u;
}

EnergyDensity planar_energy_density(const ElasticConstants& c, double u, const Vec3& g,
                                    double ut) noexcept {
  const double s = std::sin(u), co = std::cos(u);
  const double splay = co * g[1] - s * g[0];
  const double bend = co * g[0] + s * g[1];
  EnergyDensity e;
  e.kinetic = 0.5 * ut * ut;
  e.splay_like = 0.5 * c.alpha * splay * splay;
  e.twist_axis = 0.5 * c.beta * g[2] * g[2];
  e.bend_like = 0.5 * c.gamma * bend * bend;
  return e;
}

double oseen_frank_density(const ElasticConstants& c, const Director& n, const Mat3& dn) {
  const double nn = n.norm();
  if (!(std::abs(nn - 1.0) <= kDirectorUnitTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "director must have unit norm (|n| = " << nn << ")";
    throw PreconditionError(os.str());
  }
  const double div = dn[0][0] + dn[1][1] + dn[2][2];
  // curl n = (d2 n3 - d3 n2, d3 n1 - d1 n3, d1 n2 - d2 n1)
  const Vec3 curl = {dn[2][1] - dn[1][2], dn[0][2] - dn[2][0], dn[1][0] - dn[0][1]};
  const Vec3 v = n.as_array();
  const double twist = v[0] * curl[0] + v[1] * curl[1] + v[2] * curl[2];
  const Vec3 cross = {v[1] * curl[2] - v[2] * curl[1], v[2] * curl[0] - v[0] * curl[2],
                      v[0] * curl[1] - v[1] * curl[0]};
  const double bend = cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2];
  return 0.5 * c.alpha * div * div + 0.5 * c.beta * twist * twist + 0.5 * c.gamma * bend;
}

Director director_from_angle(double u) noexcept { return {std::cos(u), std::sin(u), 0.0}; }

Mat3 director_gradient(double u, const Vec3& g) noexcept {
  const double s = std::sin(u), co = std::cos(u);
  Mat3 d{};
  for (int j = 0; j < 3; ++j) {
    d[0][j] = -s * g[j];
    d[1][j] = co * g[j];
  }
  return d;
}

bool AlgebraReport::passed() const noexcept {
  return max_spectrum_deviation <= tolerance && max_principal_spectrum_deviation <= tolerance &&
         max_determinant_deviation <= tolerance && max_trace_deviation <= tolerance &&
         min_rescaled_eigenvalue >= -tolerance && max_rescaled_second_eigenvalue <= tolerance &&
         max_rescaled_trace_deviation <= tolerance && max_reduction_deviation <= tolerance &&
         max_forcing_parity_deviation <= tolerance && max_offdiag_sum <= tolerance &&
         max_principal_rescaled_deviation <= tolerance;
}

namespace {

Eigen::Vector3d sorted_eigenvalues(const CoefficientMatrix& m) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = m.entries[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();  // ascending
}

Eigen::Vector3d sorted3(double a, double b, double c) {
  std::array<double, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return {v[0], v[1], v[2]};
}

// Relative comparison scale: the identities are exact in real arithmetic, so
// only rounding (proportional to the largest constant) separates the sides.
double scale_of(const ElasticConstants& c) { return std::max(1.0, c.max_constant()); }

}  // namespace

AlgebraReport verify_algebra(std::size_t samples, std::uint64_t seed) {
  AlgebraReport r;
  r.samples = samples;
  r.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logc(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> angle(-4.0 * std::numbers::pi, 4.0 * std::numbers::pi);
  std::uniform_real_distribution<double> grad(-3.0, 3.0);

  for (std::size_t k = 0; k < samples; ++k) {
    ElasticConstants c{std::exp(logc(rng)), std::exp(logc(rng)), std::exp(logc(rng))};
    const double u = angle(rng);
    const Vec3 g = {grad(rng), grad(rng), grad(rng)};
    const double sc = scale_of(c);

    const auto a = coefficient_matrix(c, u);
    const auto ev = sorted_eigenvalues(a);
    const auto expect = sorted3(c.alpha, c.gamma, c.beta);
    r.max_spectrum_deviation = std::max(r.max_spectrum_deviation, (ev - expect).cwiseAbs().maxCoeff() / sc);
    const auto evp = sorted_eigenvalues(principal_matrix(c, u));
    r.max_principal_spectrum_deviation =
        std::max(r.max_principal_spectrum_deviation, (evp - expect).cwiseAbs().maxCoeff() / sc);

    r.max_determinant_deviation = std::max(
        r.max_determinant_deviation, std::abs(a.block_determinant() - c.alpha * c.gamma) / (sc * sc));
    const auto w = wave_speeds(c, u);
    r.max_trace_deviation =
        std::max(r.max_trace_deviation, std::abs(w.c1_sq + w.c2_sq - (c.alpha + c.gamma)) / sc);

    // The rescaled matrix needs alpha <= gamma; order the pair for this part.
    ElasticConstants cr = c;
    if (cr.alpha > cr.gamma) std::swap(cr.alpha, cr.gamma);
    const double c0 = cr.rescaled_c0();
    const double sc0 = std::max(1.0, c0);
    const auto abar = rescaled_matrix(cr, u);
    const auto evr = sorted_eigenvalues(abar);
    r.min_rescaled_eigenvalue = std::min(r.min_rescaled_eigenvalue, evr[0] / sc0);
    r.max_rescaled_second_eigenvalue = std::max(r.max_rescaled_second_eigenvalue, std::abs(evr[1]) / sc0);
    r.max_rescaled_trace_deviation =
        std::max(r.max_rescaled_trace_deviation, std::abs(abar.trace() - c0) / sc0);

    const auto red = reduced_matrix(cr, u);
    double diag_dev = 0.0;
    for (int i = 0; i < 2; ++i) diag_dev = std::max(diag_dev, std::abs(red(i, i) - abar(i, i)));
    r.max_offdiag_sum = std::max({r.max_offdiag_sum, std::abs(abar(0, 1) + red(0, 1)) / sc0, diag_dev / sc0,
                                  std::abs(red(2, 2)) / sc0});
    r.max_offdiag_difference = std::max(r.max_offdiag_difference, std::abs(abar(0, 1) - red(0, 1)));

    const auto p = principal_matrix(cr, u);
    double pdev = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double pij = p(i, j) / cr.alpha - (i == j ? 1.0 : 0.0);
        pdev = std::max(pdev, std::abs(pij - abar(i, j)));
      }
    r.max_principal_rescaled_deviation = std::max(r.max_principal_rescaled_deviation, pdev / sc0);

    const double e_of = oseen_frank_density(c, director_from_angle(u), director_gradient(u, g));
    const double e_pl = planar_energy_density(c, u, g, 0.0).elastic();
    r.max_reduction_deviation =
        std::max(r.max_reduction_deviation, std::abs(e_of - e_pl) / (sc * std::max(1.0, e_pl)));

    const double f1 = forcing(c, u, g[0], g[1]);
    const double f2 = forcing(c, u, -g[0], -g[1]);
    r.max_forcing_parity_deviation = std::max(r.max_forcing_parity_deviation, std::abs(f1 - f2));
  }
  return r;
}

}  // namespace nematowave
