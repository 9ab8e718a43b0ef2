#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "nematowave/kernels.hpp"

using namespace nematowave::kernels;
namespace {

struct Fixture {
  std::size_t n1, n2, n3;
  std::vector<double> u, a11, a22, a12, s2u, c2u;
  ConservativeArgs args;

  Fixture(int dim, std::size_t n1_, std::size_t n2_, std::size_t n3_, unsigned seed)
      : n1(n1_), n2(n2_), n3(n3_) {
    const std::size_t n = n1 * n2 * n3;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    for (auto* v : {&u, &a11, &a22, &a12, &s2u, &c2u}) {
      v->resize(n);
      for (auto& x : *v) x = U(rng);
    }
    args.dim = dim;
    args.s1 = static_cast<std::ptrdiff_t>(n2 * n3);
    args.s2 = static_cast<std::ptrdiff_t>(n3);
    args.s3 = 1;
    args.k1 = 12.5;
    args.k2 = 7.25;
    args.k3 = 3.5;
    args.kx = 1.0 / 3.0;
    args.ih1 = 0.7;
    args.ih2 = 1.3;
    args.hh1 = 0.35;
    args.hh2 = 0.65;
    args.beta2 = 2.6;
    args.half_amg = -0.45;
    args.amg = -0.9;
    args.u = u.data();
    args.a11 = a11.data();
    args.a22 = a22.data();
    args.a12 = a12.data();
    args.s2u = s2u.data();
    args.c2u = c2u.data();
  }

  // one interior line along the fastest axis
  std::pair<std::size_t, std::size_t> line(std::size_t i1, std::size_t i2) const {
    const std::size_t nf = args.dim == 1 ? n1 : (args.dim == 2 ? n2 : n3);
    const std::size_t base = args.dim == 1 ? 0 : (args.dim == 2 ? i1 * n2 : (i1 * n2 + i2) * n3);
    return {base + 1, base + nf - 1};
  }

  std::vector<double> eval(const KernelTable& t, std::size_t i1, std::size_t i2) {
    std::vector<double> acc(u.size(), 0.0);
    args.acc = acc.data();
    const auto [b, e] = line(i1, i2);
    t.conservative_line(args, b, e);
    return acc;
  }
};

TEST(Kernels, ScalarLineMatchesReferenceCell) {
  for (int dim = 1; dim <= 3; ++dim) {
    Fixture f(dim, dim == 1 ? 37 : 9, dim >= 2 ? 23 : 1, dim == 3 ? 19 : 1, 5);
    const auto acc = f.eval(scalar_table(), 3, 4);
    const auto [b, e] = f.line(3, 4);
    for (std::size_t p = b; p < e; ++p) {
      const double want = dim == 1 ? conservative_cell<1>(f.args, p)
                          : dim == 2 ? conservative_cell<2>(f.args, p)
                                     : conservative_cell<3>(f.args, p);
      ASSERT_EQ(acc[p], want);
    }
  }
}

TEST(Kernels, Avx2AgreesBitwiseWithScalar) {
  const KernelTable* v = avx2_table();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  for (int dim = 1; dim <= 3; ++dim)
    for (std::size_t len : {9u, 10u, 13u, 16u, 31u}) {
      Fixture f(dim, dim == 1 ? len : 9, dim == 2 ? len : (dim == 3 ? 8 : 1), dim == 3 ? len : 1, 17 + len);
      const auto a = f.eval(scalar_table(), 4, 3);
      const auto b = f.eval(*v, 4, 3);
      ASSERT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0) << "dim " << dim << " len " << len;
    }
}

TEST(Kernels, VectorOpsAgreeBitwise) {
  const KernelTable* v = avx2_table();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    std::vector<double> x(n), y(n), o1(n), o2(n), acc1(n), acc2(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = U(rng);
      y[i] = U(rng);
      acc1[i] = acc2[i] = U(rng);
    }
    scalar_table().axpy(n, 0.3, x.data(), y.data(), o1.data());
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(o1[i], x[i] + 0.3 * y[i]);
    scalar_table().accumulate(n, 1.0 / 6.0, x.data(), acc1.data());
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(acc1[i], acc2[i] + (1.0 / 6.0) * x[i]);
    if (!v) continue;
    v->axpy(n, 0.3, x.data(), y.data(), o2.data());
    v->accumulate(n, 1.0 / 6.0, x.data(), acc2.data());
    EXPECT_EQ(o1, o2);
    EXPECT_EQ(acc1, acc2);
  }
}

TEST(Kernels, SelectByName) {
  EXPECT_TRUE(select("scalar"));
  EXPECT_STREQ(active().name, "scalar");
  EXPECT_FALSE(select("neon"));
  if (avx2_table()) {
    EXPECT_TRUE(select("avx2"));
    EXPECT_STREQ(active().name, "avx2");
  }
}

}  // namespace
