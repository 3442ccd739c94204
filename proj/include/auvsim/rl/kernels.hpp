#pragma once

#include <cstddef>

// Dense-layer primitives. The scalar table is the reference; the AVX2 table
// is chosen at runtime when the CPU supports it. Both accumulate in a fixed
// order, so a given table is bit-reproducible from run to run.
namespace auvsim::rl::kernels {

enum class Isa { kScalar, kAvx2 };

struct Table {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[o] = b[o] + dot(W[o, :], x) for a row-major out x in matrix
  void (*affine)(const double* w, const double* b, const double* x, double* y, std::size_t out,
                 std::size_t in);
};

const Table& scalar_table();
// nullptr when the AVX2 variant was not compiled in.
const Table* avx2_table();
bool cpu_has_avx2();

// Table used by the networks. Defaults to AVX2 when available.
const Table& active();
// Returns false (and leaves the selection unchanged) if the ISA is unavailable.
bool select(Isa isa);
const char* isa_name(Isa isa);

}  // namespace auvsim::rl::kernels
