#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "mst/clustering.hpp"
#include "mst/feature_io.hpp"
#include "mst/graph_matching.hpp"
#include "mst/transform.hpp"

namespace mst {

struct MstOptions {
  std::size_t k = 3;
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  EnergyParams energy;
  TransformParams transform;
};

struct StageTiming {
  double cluster = 0.0;
  double match = 0.0;
  double transform = 0.0;
  double total = 0.0;
};

struct QualityMetrics {
  double content_loss = 0.0;
  double style_loss = 0.0;
  double total = 0.0;
};

struct MstResult {
  FeatureMap output;
  ClusterModel clusters;
  LabelField labels;
  double energy = 0.0;
  std::vector<std::size_t> matched_sizes;  // content positions per label
  StageTiming timing;
  QualityMetrics metrics;  // conv4_1 losses of the output against the inputs
};

/// Style matrix of several style maps, columns concatenated in order.
FeatureMatrix stack_styles(const std::vector<FeatureMap>& styles);

/// Cluster style features, match content positions to clusters, transform
/// each matched group and reassemble. Throws ChannelMismatchError and
/// TooFewPointsError on unusable inputs.
MstResult run_mst(const FeatureMap& content, const std::vector<FeatureMap>& styles, const MstOptions& options);

/// File-level configuration of one transfer run.
struct PipelineConfig {
  std::filesystem::path content;
  std::vector<std::filesystem::path> styles;
  std::filesystem::path output;
  std::optional<std::filesystem::path> save_labels;    // .npy, or .png for a cluster map
  std::optional<std::filesystem::path> save_clusters;  // JSON sidecar
  MstOptions options;
  std::size_t threads = 1;
};

/// Loads inputs, runs the pipeline, writes outputs and returns the result
/// with its JSON report.
std::pair<MstResult, nlohmann::json> run_mst(const PipelineConfig& config);

nlohmann::json make_report(const MstResult& result, const PipelineConfig& config);

}  // namespace mst
