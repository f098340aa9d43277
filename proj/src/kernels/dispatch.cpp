#include <atomic>
#include <cstdlib>
#include <string>

#include "wordconf/error.hpp"
#include "wordconf/kernels.hpp"

namespace wordconf::kern {

#ifdef WORDCONF_BUILD_AVX2
const Ops& avx2_ops_impl();
#endif

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* avx2_ops() {
#ifdef WORDCONF_BUILD_AVX2
  if (avx2_available()) return &avx2_ops_impl();
#endif
  return nullptr;
}

namespace {

const Ops* pick_initial() {
  if (const char* env = std::getenv("WORDCONF_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_ops();
    if (want == "avx2") {
      if (const Ops* t = avx2_ops()) return t;
      throw usage_error("WORDCONF_SIMD=avx2 requested but AVX2 is unavailable");
    }
    throw usage_error("WORDCONF_SIMD must be 'scalar' or 'avx2', got '" + want +
                      "'");
  }
  if (const Ops* t = avx2_ops()) return t;
  return &scalar_ops();
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{pick_initial()};
  return slot;
}

}  // namespace

const Ops& ops() { return *active_slot().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      active_slot().store(&scalar_ops(), std::memory_order_relaxed);
      break;
    case Isa::Avx2: {
      const Ops* t = avx2_ops();
      if (t == nullptr) throw usage_error("AVX2 kernels are unavailable");
      active_slot().store(t, std::memory_order_relaxed);
      break;
    }
  }
}

std::string active_isa_name() { return ops().name; }

}  // namespace wordconf::kern
