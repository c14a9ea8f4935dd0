#pragma once

#include <span>
#include <string_view>

namespace mst {

enum class Metric { kCosine, kEuclidean };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

/// 1 - a.b / (|a| |b|), in [0, 2]. A zero-magnitude argument is treated as
/// orthogonal to everything (returns 1) and counted in
/// degenerate_cosine_count().
double cosine_distance(std::span<const float> a, std::span<const float> b);

/// Distance from a float feature vector to a double-precision center whose
/// norm is already known. Used on hot paths through the SIMD kernels.
double point_center_distance(std::span<const float> x, std::span<const double> center, double center_norm,
                             Metric metric);

/// Number of zero-magnitude inputs seen by the cosine routines.
unsigned long long degenerate_cosine_count();

}  // namespace mst
