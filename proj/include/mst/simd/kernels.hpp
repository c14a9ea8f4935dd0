#pragma once

// Data-parallel inner loops shared by clustering, matching and blending.
//
// Every kernel has a portable scalar reference and optional AVX2 / NEON
// variants. The active table is picked once at startup from CPU features;
// MST_SIMD=scalar|avx2|neon in the environment overrides the choice.
//
// Reductions accumulate in double. Vector variants keep several partial
// sums, so they agree with the scalar reference to rounding only.
// Elementwise kernels (accumulate, blend) are bit-identical across levels.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mst::simd {

enum class Level { kScalar, kAvx2, kNeon };

std::string_view level_name(Level level);

struct KernelTable {
  Level level;
  /// sum_i a[i] * b[i]
  double (*dot_ff)(const float* a, const float* b, std::size_t n);
  /// sum_i x[i] * c[i]
  double (*dot_fd)(const float* x, const double* c, std::size_t n);
  /// sum_i (x[i] - c[i])^2
  double (*sqdist_fd)(const float* x, const double* c, std::size_t n);
  /// acc[i] += x[i]
  void (*accumulate)(double* acc, const float* x, std::size_t n);
  /// out[i] = alpha * t[i] + (1 - alpha) * c[i], no fused multiply-add
  void (*blend)(double* out, const double* t, const double* c, double alpha, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Kernels for a given level; nullptr when the level is not compiled in or
/// the CPU lacks the instructions.
const KernelTable* kernels_for(Level level);

/// All levels usable on this machine, scalar first.
std::vector<Level> available_levels();

/// The table selected for this process.
const KernelTable& active();

/// Force a level (tests and benchmarks). Returns false if unavailable.
bool set_active(Level level);

}  // namespace mst::simd
