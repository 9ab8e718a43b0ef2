#include <cstdlib>
#include <cstring>

#include "nematowave/kernels.hpp"

namespace nematowave::kernels {

namespace {

void conservative_line(const ConservativeArgs& a, std::size_t begin, std::size_t end) {
  switch (a.dim) {
    case 1:
      for (std::size_t p = begin; p < end; ++p) a.acc[p] = conservative_cell<1>(a, p);
      break;
    case 2:
      for (std::size_t p = begin; p < end; ++p) a.acc[p] = conservative_cell<2>(a, p);
      break;
    default:
      for (std::size_t p = begin; p < end; ++p) a.acc[p] = conservative_cell<3>(a, p);
      break;
  }
}

void axpy(std::size_t n, double a, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * y[i];
}

void accumulate(std::size_t n, double w, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + w * x[i];
}

const KernelTable kScalar{"scalar", conservative_line, axpy, accumulate};

const KernelTable* g_active = nullptr;

const KernelTable* pick_default() {
  const char* env = std::getenv("NEMATOWAVE_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return &kScalar;
  if (const KernelTable* t = avx2_table()) return t;
  return &kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable& active() {
  if (!g_active) g_active = pick_default();
  return *g_active;
}

bool select(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    g_active = &kScalar;
    return true;
  }
  if (std::strcmp(name, "avx2") == 0) {
    if (const KernelTable* t = avx2_table()) {
      g_active = t;
      return true;
    }
  }
  return false;
}

}  // namespace nematowave::kernels
