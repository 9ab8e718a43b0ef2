#pragma once

// Hot stencil and vector kernels. A scalar reference table always exists; an
// AVX2 table is built when the compiler supports it and chosen at runtime.
// Both evaluate the same expression tree in the same order, so with
// floating-point contraction disabled they agree bitwise.
//
// NEMATOWAVE_KERNELS=scalar|avx2 in the environment overrides the choice.

#include <cstddef>

namespace nematowave::kernels {

/// Inputs for the conservative acceleration on interior nodes. Strides are
/// in elements; s[a] is unused for a >= dim.
struct ConservativeArgs {
  int dim = 1;
  std::ptrdiff_t s1 = 0, s2 = 0, s3 = 0;
  double k1 = 0.0, k2 = 0.0, k3 = 0.0;  // 0.5/h_a^2
  double kx = 0.0;                      // 1/(4 h1 h2)
  double ih1 = 0.0, ih2 = 0.0;          // 1/h_a
  double hh1 = 0.0, hh2 = 0.0;          // 1/(2 h_a)
  double beta2 = 0.0;                   // beta + beta
  double half_amg = 0.0;                // (alpha - gamma)/2
  double amg = 0.0;                     // alpha - gamma
  const double* u = nullptr;
  const double* a11 = nullptr;
  const double* a22 = nullptr;
  const double* a12 = nullptr;
  const double* s2u = nullptr;  // sin 2u
  const double* c2u = nullptr;  // cos 2u
  double* acc = nullptr;
};

/// Writes acc[p] for p in [begin, end); every such p must be an interior node.
using ConservativeLine = void (*)(const ConservativeArgs&, std::size_t begin, std::size_t end);
/// out[i] = x[i] + a * y[i]
using Axpy = void (*)(std::size_t n, double a, const double* x, const double* y, double* out);
/// y[i] = y[i] + w * x[i]
using Accumulate = void (*)(std::size_t n, double w, const double* x, double* y);

struct KernelTable {
  const char* name;
  ConservativeLine conservative_line;
  Axpy axpy;
  Accumulate accumulate;
};

const KernelTable& scalar_table();
/// nullptr when not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();
/// The table in use; honours NEMATOWAVE_KERNELS.
const KernelTable& active();
/// Force a table for testing ("scalar" or "avx2"); returns false if unavailable.
bool select(const char* name);

// Reference per-cell formula shared by the scalar kernel and the SIMD tails.
template <int Dim>
inline double conservative_cell(const ConservativeArgs& a, std::size_t p) {
  const double* u = a.u;
  const double u0 = u[p];
  const double u1p = u[p + a.s1], u1m = u[p - a.s1];
  const double f1 = ((a.a11[p] + a.a11[p + a.s1]) * (u1p - u0) - (a.a11[p - a.s1] + a.a11[p]) * (u0 - u1m)) * a.k1;
  const double dp1 = (u1p - u0) * a.ih1;
  const double dm1 = (u0 - u1m) * a.ih1;
  const double avg1 = 0.5 * (dp1 * dp1 + dm1 * dm1);
  if constexpr (Dim == 1) {
    return f1 - a.half_amg * a.s2u[p] * avg1;
  } else {
    const double u2p = u[p + a.s2], u2m = u[p - a.s2];
    const double f2 = ((a.a22[p] + a.a22[p + a.s2]) * (u2p - u0) - (a.a22[p - a.s2] + a.a22[p]) * (u0 - u2m)) * a.k2;
    const double upp = u[p + a.s1 + a.s2], upm = u[p + a.s1 - a.s2];
    const double ump = u[p - a.s1 + a.s2], umm = u[p - a.s1 - a.s2];
    const double mx = (a.a12[p + a.s1] * (upp - upm) - a.a12[p - a.s1] * (ump - umm)) +
                      (a.a12[p + a.s2] * (upp - ump) - a.a12[p - a.s2] * (upm - umm));
    const double dp2 = (u2p - u0) * a.ih2;
    const double dm2 = (u0 - u2m) * a.ih2;
    const double avg2 = 0.5 * (dp2 * dp2 + dm2 * dm2);
    const double d1 = (u1p - u1m) * a.hh1;
    const double d2 = (u2p - u2m) * a.hh2;
    const double force = a.half_amg * a.s2u[p] * (avg1 - avg2) - a.amg * a.c2u[p] * (d1 * d2);
    double r = f1 + f2;
    if constexpr (Dim == 3) {
      const double f3 = a.beta2 * ((u[p + a.s3] - u0) - (u0 - u[p - a.s3])) * a.k3;
      r = r + f3;
    }
    return (r + mx * a.kx) - force;
  }
}

}  // namespace nematowave::kernels
