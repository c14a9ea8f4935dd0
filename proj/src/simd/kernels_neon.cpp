#include <arm_neon.h>

#include "mst/simd/kernels.hpp"

namespace mst::simd {
namespace {

double dot_ff(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

double dot_fd(const float* x, const double* c, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t vx = vld1q_f32(x + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(vx)), vld1q_f64(c + i));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(vx), vld1q_f64(c + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += static_cast<double>(x[i]) * c[i];
  return sum;
}

double sqdist_fd(const float* x, const double* c, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t vx = vld1q_f32(x + i);
    const float64x2_t d0 = vsubq_f64(vcvt_f64_f32(vget_low_f32(vx)), vld1q_f64(c + i));
    const float64x2_t d1 = vsubq_f64(vcvt_high_f64_f32(vx), vld1q_f64(c + i + 2));
    acc0 = vfmaq_f64(acc0, d0, d0);
    acc1 = vfmaq_f64(acc1, d1, d1);
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(x[i]) - c[i];
    sum += d * d;
  }
  return sum;
}

void accumulate(double* acc, const float* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vcvt_f64_f32(vld1_f32(x + i));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), v));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

void blend(double* out, const double* t, const double* c, double alpha, std::size_t n) {
  const double beta = 1.0 - alpha;
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t vb = vdupq_n_f64(beta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a = vmulq_f64(va, vld1q_f64(t + i));
    const float64x2_t b = vmulq_f64(vb, vld1q_f64(c + i));
    vst1q_f64(out + i, vaddq_f64(a, b));
  }
  for (; i < n; ++i) {
    const double a = alpha * t[i];
    const double b = beta * c[i];
    out[i] = a + b;
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Level::kNeon, dot_ff, dot_fd, sqdist_fd, accumulate, blend};
  return table;
}

}  // namespace mst::simd
