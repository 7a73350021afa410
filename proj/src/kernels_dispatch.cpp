// Backend selection. The active backend is chosen once: an explicit
// LQOT_KERNELS environment override wins, otherwise the widest available
// variant for the host CPU.

#include <cstdlib>
#include <cstring>

#include "lqot/kernels.hpp"

namespace lqot::kernels {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(LQOT_BUILD_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(LQOT_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Ops& table(Backend b) {
  switch (b) {
    case Backend::scalar:
      return scalar_ops;
    case Backend::avx2:
#if defined(LQOT_BUILD_AVX2)
      if (backend_available(Backend::avx2)) return avx2_ops;
#endif
      return scalar_ops;
    case Backend::neon:
#if defined(LQOT_BUILD_NEON)
      return neon_ops;
#endif
      return scalar_ops;
  }
  return scalar_ops;
}

namespace {

Backend choose_backend() {
  if (const char* env = std::getenv("LQOT_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2))
      return Backend::avx2;
    if (std::strcmp(env, "neon") == 0 && backend_available(Backend::neon))
      return Backend::neon;
    return Backend::scalar;
  }
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend b = choose_backend();
  return b;
}

const Ops& ops() { return table(active_backend()); }

}  // namespace lqot::kernels
