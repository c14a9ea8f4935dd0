#include <atomic>
#include <cstdlib>
#include <string>

#include "mst/simd/kernels.hpp"

namespace mst::simd {

#if defined(MST_BUILD_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(MST_BUILD_NEON)
const KernelTable& neon_kernels();
#endif

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
    case Level::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable* kernels_for(Level level) {
  switch (level) {
    case Level::kScalar:
      return &scalar_kernels();
    case Level::kAvx2:
#if defined(MST_BUILD_AVX2)
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_kernels();
#endif
      return nullptr;
    case Level::kNeon:
#if defined(MST_BUILD_NEON)
      return &neon_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Level> available_levels() {
  std::vector<Level> out;
  for (Level l : {Level::kScalar, Level::kAvx2, Level::kNeon}) {
    if (kernels_for(l) != nullptr) out.push_back(l);
  }
  return out;
}

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("MST_SIMD")) {
    const std::string want(env);
    for (Level l : {Level::kScalar, Level::kAvx2, Level::kNeon}) {
      if (want == level_name(l)) {
        if (const KernelTable* t = kernels_for(l)) return t;
      }
    }
  }
  const auto levels = available_levels();
  return kernels_for(levels.back());
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool set_active(Level level) {
  const KernelTable* t = kernels_for(level);
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace mst::simd
