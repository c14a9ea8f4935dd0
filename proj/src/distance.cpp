#include "mst/distance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <string>

#include "mst/errors.hpp"
#include "mst/simd/kernels.hpp"

namespace mst {
namespace {

std::atomic<unsigned long long> g_degenerate{0};

double note_degenerate() {
  if (g_degenerate.fetch_add(1) == 0) {
    std::clog << "mst: warning: zero-magnitude feature vector in cosine distance; treating as orthogonal\n";
  }
  return 1.0;
}

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "euclidean") return Metric::kEuclidean;
  throw ArgumentError("unknown metric '" + std::string(name) + "' (expected cosine|euclidean)");
}

std::string_view metric_name(Metric metric) { return metric == Metric::kCosine ? "cosine" : "euclidean"; }

double cosine_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionError("cosine_distance: vector lengths differ");
  const auto& k = simd::active();
  const double aa = k.dot_ff(a.data(), a.data(), a.size());
  const double bb = k.dot_ff(b.data(), b.data(), b.size());
  if (aa <= 0.0 || bb <= 0.0) return note_degenerate();
  const double ab = k.dot_ff(a.data(), b.data(), a.size());
  return std::clamp(1.0 - ab / (std::sqrt(aa) * std::sqrt(bb)), 0.0, 2.0);
}

double point_center_distance(std::span<const float> x, std::span<const double> center, double center_norm,
                             Metric metric) {
  const auto& k = simd::active();
  if (metric == Metric::kEuclidean) return std::sqrt(k.sqdist_fd(x.data(), center.data(), x.size()));
  const double xx = k.dot_ff(x.data(), x.data(), x.size());
  if (xx <= 0.0 || center_norm <= 0.0) return note_degenerate();
  const double xc = k.dot_fd(x.data(), center.data(), x.size());
  return std::clamp(1.0 - xc / (std::sqrt(xx) * center_norm), 0.0, 2.0);
}

unsigned long long degenerate_cosine_count() { return g_degenerate.load(); }

}  // namespace mst
