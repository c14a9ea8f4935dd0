#include "mst/simd/kernels.hpp"

namespace mst::simd {
namespace {

double dot_ff(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return sum;
}

double dot_fd(const float* x, const double* c, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(x[i]) * c[i];
  return sum;
}

double sqdist_fd(const float* x, const double* c, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(x[i]) - c[i];
    sum += d * d;
  }
  return sum;
}

void accumulate(double* acc, const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

void blend(double* out, const double* t, const double* c, double alpha, std::size_t n) {
  const double beta = 1.0 - alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = alpha * t[i];
    const double b = beta * c[i];
    out[i] = a + b;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Level::kScalar, dot_ff, dot_fd, sqdist_fd, accumulate, blend};
  return table;
}

}  // namespace mst::simd
