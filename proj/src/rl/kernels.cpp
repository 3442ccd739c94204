#include "auvsim/rl/kernels.hpp"

#include <atomic>

namespace auvsim::rl::kernels {

#ifndef AUVSIM_HAVE_AVX2
const Table* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(AUVSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Table* initial() {
  if (cpu_has_avx2() && avx2_table()) return avx2_table();
  return &scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{initial()};
  return t;
}

}  // namespace

const Table& active() { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) {
  if (isa == Isa::kScalar) {
    current().store(&scalar_table());
    return true;
  }
  if (!cpu_has_avx2() || !avx2_table()) return false;
  current().store(avx2_table());
  return true;
}

const char* isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

}  // namespace auvsim::rl::kernels
