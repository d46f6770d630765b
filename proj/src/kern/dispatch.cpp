#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hwas/kern/kernels.hpp"

namespace hwas::kern {
namespace {

bool cpu_has_avx2() {
#if defined(HWAS_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* pick_auto() {
#if defined(__aarch64__)
  return &neon_ops();
#else
#if defined(HWAS_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_ops();
#endif
  return &scalar_ops();
#endif
}

const Ops* pick_named(const std::string& name) {
  if (name == "auto") return pick_auto();
  if (name == "scalar") return &scalar_ops();
#if defined(HWAS_HAVE_AVX2)
  if (name == "avx2") {
    if (!cpu_has_avx2()) throw std::runtime_error("avx2 kernels requested but CPU lacks AVX2/FMA");
    return &avx2_ops();
  }
#endif
#if defined(__aarch64__)
  if (name == "neon") return &neon_ops();
#endif
  throw std::runtime_error("unknown or unavailable kernel backend: " + name);
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve() {
  const char* env = std::getenv("HWAS_KERNELS");
  const Ops* ops = env ? pick_named(env) : pick_auto();
  g_active.store(ops, std::memory_order_release);
  return ops;
}

}  // namespace

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) ops = resolve();
  return *ops;
}

void force_backend(const std::string& name) {
  g_active.store(pick_named(name), std::memory_order_release);
}

std::string available_backends() {
  std::string s = "scalar";
#if defined(HWAS_HAVE_AVX2)
  if (cpu_has_avx2()) s += ",avx2";
#endif
#if defined(__aarch64__)
  s += ",neon";
#endif
  return s;
}

}  // namespace hwas::kern
