#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace motilab::kernels {

namespace {

bool avx2_usable() {
#if defined(__x86_64__) || defined(__i386__)
  return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
         __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool neon_usable() { return detail::neon_table() != nullptr; }

Backend pick_default() {
  if (const char* env = std::getenv("MOTILAB_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_usable()) return Backend::avx2;
    if (std::strcmp(env, "neon") == 0 && neon_usable()) return Backend::neon;
    std::fprintf(stderr,
                 "motilab: MOTILAB_KERNELS=%s not usable here, auto-selecting\n",
                 env);
  }
  if (avx2_usable()) return Backend::avx2;
  if (neon_usable()) return Backend::neon;
  return Backend::scalar;
}

std::atomic<Backend> g_backend{pick_default()};

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return avx2_usable();
    case Backend::neon: return neon_usable();
  }
  return false;
}

const Ops& ops(Backend b) {
  switch (b) {
    case Backend::scalar: return detail::scalar_table();
    case Backend::avx2:
      if (const Ops* t = detail::avx2_table()) return *t;
      break;
    case Backend::neon:
      if (const Ops* t = detail::neon_table()) return *t;
      break;
  }
  throw std::runtime_error("kernel backend not available");
}

const Ops& ops() { return ops(g_backend.load(std::memory_order_relaxed)); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
  if (!backend_available(b)) return false;
  g_backend.store(b, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

}  // namespace motilab::kernels
