// Compiled with -mavx2 only (no FMA), so every lane rounds exactly like the
// scalar reference.
#include "nematowave/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace nematowave::kernels {

namespace {

inline __m256d ld(const double* p) { return _mm256_loadu_pd(p); }

template <int Dim>
void line(const ConservativeArgs& a, std::size_t begin, std::size_t end) {
  const double* u = a.u;
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d k1 = _mm256_set1_pd(a.k1), ih1 = _mm256_set1_pd(a.ih1);
  const __m256d k2 = _mm256_set1_pd(a.k2), ih2 = _mm256_set1_pd(a.ih2);
  const __m256d hh1 = _mm256_set1_pd(a.hh1), hh2 = _mm256_set1_pd(a.hh2);
  const __m256d kx = _mm256_set1_pd(a.kx), k3 = _mm256_set1_pd(a.k3), beta2 = _mm256_set1_pd(a.beta2);
  const __m256d hamg = _mm256_set1_pd(a.half_amg), amg = _mm256_set1_pd(a.amg);
  const std::ptrdiff_t s1 = a.s1, s2 = a.s2, s3 = a.s3;

  std::size_t p = begin;
  for (; p + 4 <= end; p += 4) {
    const __m256d u0 = ld(u + p);
    const __m256d u1p = ld(u + p + s1), u1m = ld(u + p - s1);
    const __m256d a0 = ld(a.a11 + p);
    const __m256d dpl1 = _mm256_sub_pd(u1p, u0), dmi1 = _mm256_sub_pd(u0, u1m);
    const __m256d f1 = _mm256_mul_pd(
        _mm256_sub_pd(_mm256_mul_pd(_mm256_add_pd(a0, ld(a.a11 + p + s1)), dpl1),
                      _mm256_mul_pd(_mm256_add_pd(ld(a.a11 + p - s1), a0), dmi1)),
        k1);
    const __m256d dp1 = _mm256_mul_pd(dpl1, ih1), dm1 = _mm256_mul_pd(dmi1, ih1);
    const __m256d avg1 = _mm256_mul_pd(half, _mm256_add_pd(_mm256_mul_pd(dp1, dp1), _mm256_mul_pd(dm1, dm1)));
    const __m256d s2u = ld(a.s2u + p);
    if constexpr (Dim == 1) {
      _mm256_storeu_pd(a.acc + p, _mm256_sub_pd(f1, _mm256_mul_pd(_mm256_mul_pd(hamg, s2u), avg1)));
    } else {
      const __m256d u2p = ld(u + p + s2), u2m = ld(u + p - s2);
      const __m256d b0 = ld(a.a22 + p);
      const __m256d dpl2 = _mm256_sub_pd(u2p, u0), dmi2 = _mm256_sub_pd(u0, u2m);
      const __m256d f2 = _mm256_mul_pd(
          _mm256_sub_pd(_mm256_mul_pd(_mm256_add_pd(b0, ld(a.a22 + p + s2)), dpl2),
                        _mm256_mul_pd(_mm256_add_pd(ld(a.a22 + p - s2), b0), dmi2)),
          k2);
      const __m256d upp = ld(u + p + s1 + s2), upm = ld(u + p + s1 - s2);
      const __m256d ump = ld(u + p - s1 + s2), umm = ld(u + p - s1 - s2);
      const __m256d mx = _mm256_add_pd(
          _mm256_sub_pd(_mm256_mul_pd(ld(a.a12 + p + s1), _mm256_sub_pd(upp, upm)),
                        _mm256_mul_pd(ld(a.a12 + p - s1), _mm256_sub_pd(ump, umm))),
          _mm256_sub_pd(_mm256_mul_pd(ld(a.a12 + p + s2), _mm256_sub_pd(upp, ump)),
                        _mm256_mul_pd(ld(a.a12 + p - s2), _mm256_sub_pd(upm, umm))));
      const __m256d dp2 = _mm256_mul_pd(dpl2, ih2), dm2 = _mm256_mul_pd(dmi2, ih2);
      const __m256d avg2 = _mm256_mul_pd(half, _mm256_add_pd(_mm256_mul_pd(dp2, dp2), _mm256_mul_pd(dm2, dm2)));
      const __m256d d1 = _mm256_mul_pd(_mm256_sub_pd(u1p, u1m), hh1);
      const __m256d d2 = _mm256_mul_pd(_mm256_sub_pd(u2p, u2m), hh2);
      const __m256d force =
          _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(hamg, s2u), _mm256_sub_pd(avg1, avg2)),
                        _mm256_mul_pd(_mm256_mul_pd(amg, ld(a.c2u + p)), _mm256_mul_pd(d1, d2)));
      __m256d r = _mm256_add_pd(f1, f2);
      if constexpr (Dim == 3) {
        const __m256d f3 = _mm256_mul_pd(
            _mm256_mul_pd(beta2, _mm256_sub_pd(_mm256_sub_pd(ld(u + p + s3), u0), _mm256_sub_pd(u0, ld(u + p - s3)))),
            k3);
        r = _mm256_add_pd(r, f3);
      }
      _mm256_storeu_pd(a.acc + p, _mm256_sub_pd(_mm256_add_pd(r, _mm256_mul_pd(mx, kx)), force));
    }
  }
  for (; p < end; ++p) a.acc[p] = conservative_cell<Dim>(a, p);
}

void conservative_line(const ConservativeArgs& a, std::size_t begin, std::size_t end) {
  switch (a.dim) {
    case 1:
      line<1>(a, begin, end);
      break;
    case 2:
      line<2>(a, begin, end);
      break;
    default:
      line<3>(a, begin, end);
      break;
  }
}

void axpy(std::size_t n, double a, const double* x, const double* y, double* out) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(ld(x + i), _mm256_mul_pd(va, ld(y + i))));
  for (; i < n; ++i) out[i] = x[i] + a * y[i];
}

void accumulate(std::size_t n, double w, const double* x, double* y) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(ld(y + i), _mm256_mul_pd(vw, ld(x + i))));
  for (; i < n; ++i) y[i] = y[i] + w * x[i];
}

const KernelTable kAvx2{"avx2", conservative_line, axpy, accumulate};

}  // namespace

const KernelTable* avx2_table() {
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &kAvx2 : nullptr;
}

}  // namespace nematowave::kernels

#else

namespace nematowave::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace nematowave::kernels

#endif
