#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "auvsim/rl/dense_net.hpp"
#include "auvsim/rl/kernels.hpp"

using namespace auvsim::rl;

namespace {

std::vector<double> randn(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Restores the previously active table on scope exit.
struct IsaGuard {
  kernels::Isa saved = kernels::active().isa;
  ~IsaGuard() { kernels::select(saved); }
};

}  // namespace

TEST_SUITE("rl_kernels") {
  TEST_CASE("scalar kernels against plain loops") {
    std::mt19937_64 rng(1);
    const auto& s = kernels::scalar_table();
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 33u}) {
      const auto a = randn(rng, n), b = randn(rng, n);
      double ref = 0.0;
      for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
      CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(ref).epsilon(1e-14));
      auto y = b;
      s.axpy(0.5, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.5 * a[i]);
    }
    const std::vector<double> w{1, 2, 3, 4, 5, 6}, bias{0.5, -1.0}, x{1, 0, -1};
    std::vector<double> out(2);
    s.affine(w.data(), bias.data(), x.data(), out.data(), 2, 3);
    CHECK(out[0] == 0.5 + 1 - 3);
    CHECK(out[1] == -1.0 + 4 - 6);
  }

  TEST_CASE("AVX2 kernels match the scalar reference") {
    const kernels::Table* v = kernels::avx2_table();
    if (!v || !kernels::cpu_has_avx2()) {
      MESSAGE("AVX2 unavailable; equivalence skipped");
      return;
    }
    const auto& s = kernels::scalar_table();
    std::mt19937_64 rng(2);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 384u, 512u, 1001u}) {
      const auto a = randn(rng, n), b = randn(rng, n);
      const double ds = s.dot(a.data(), b.data(), n), dv = v->dot(a.data(), b.data(), n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(ds - dv) <= 1e-13 * (mag + 1.0));
      auto ys = b, yv = b;
      s.axpy(-1.25, a.data(), ys.data(), n);
      v->axpy(-1.25, a.data(), yv.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15 * (std::abs(ys[i]) + 1.0));
    }
    for (auto [out, in] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 5}, {4, 4}, {7, 11},
                           {13, 9}, {384, 11}, {384, 384}, {4, 384}}) {
      const auto w = randn(rng, out * in), bias = randn(rng, out), x = randn(rng, in);
      std::vector<double> ys(out), yv(out);
      s.affine(w.data(), bias.data(), x.data(), ys.data(), out, in);
      v->affine(w.data(), bias.data(), x.data(), yv.data(), out, in);
      for (std::size_t o = 0; o < out; ++o) CHECK(std::abs(ys[o] - yv[o]) <= 1e-12 * (std::sqrt(double(in)) + 1.0));
    }
  }

  TEST_CASE("network outputs agree across kernel tables") {
    IsaGuard guard;
    if (!kernels::avx2_table() || !kernels::cpu_has_avx2()) return;
    std::mt19937_64 rng(3);
    DenseNet net({11, 384, 384, 4});
    net.init_orthogonal(rng, std::sqrt(2.0), 1.0);
    const auto x = randn(rng, 11 * 16);
    REQUIRE(kernels::select(kernels::Isa::kScalar));
    DenseNet::Cache cs;
    net.forward_batch(x, 16, cs);
    const auto ref = cs.act.back();
    REQUIRE(kernels::select(kernels::Isa::kAvx2));
    DenseNet::Cache cv;
    net.forward_batch(x, 16, cv);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(ref[i] - cv.act.back()[i]) < 1e-11);
  }

  TEST_CASE("a fixed table is reproducible") {
    std::mt19937_64 rng(4);
    const auto a = randn(rng, 1000), b = randn(rng, 1000);
    const auto& t = kernels::active();
    CHECK(t.dot(a.data(), b.data(), 1000) == t.dot(a.data(), b.data(), 1000));
    CHECK(kernels::isa_name(kernels::Isa::kScalar) != nullptr);
  }

  TEST_CASE("selection falls back when unavailable") {
    IsaGuard guard;
    CHECK(kernels::select(kernels::Isa::kScalar));
    CHECK(kernels::active().isa == kernels::Isa::kScalar);
    if (!kernels::avx2_table() || !kernels::cpu_has_avx2()) {
      CHECK_FALSE(kernels::select(kernels::Isa::kAvx2));
      CHECK(kernels::active().isa == kernels::Isa::kScalar);
    }
  }
}
