#include "auvsim/rl/kernels.hpp"

namespace auvsim::rl::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void affine_scalar(const double* w, const double* b, const double* x, double* y, std::size_t out,
                   std::size_t in) {
  for (std::size_t o = 0; o < out; ++o) y[o] = b[o] + dot_scalar(w + o * in, x, in);
}

}  // namespace

const Table& scalar_table() {
  static const Table t{Isa::kScalar, dot_scalar, axpy_scalar, affine_scalar};
  return t;
}

}  // namespace auvsim::rl::kernels
