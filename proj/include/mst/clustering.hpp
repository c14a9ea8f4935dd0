#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "mst/distance.hpp"
#include "mst/feature_io.hpp"

namespace mst {

/// K sub-styles of a style feature set: centers, per-point labels, sizes.
struct ClusterModel {
  std::size_t k = 0;
  Eigen::MatrixXd centers;            // C x K, column k is the k-th center
  std::vector<std::int32_t> labels;   // one per style feature vector
  std::vector<std::size_t> counts;    // members per cluster, all >= 1
  std::vector<double> objective;      // Lloyd objective after each iteration
  std::size_t iterations = 0;
  bool converged = false;
};

struct KMeansOptions {
  std::size_t k = 3;
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
};

/// Lloyd's algorithm on squared Euclidean distance with K-means++ seeding.
/// Deterministic for a given (features, options). Throws ArgumentError for
/// K = 0 and TooFewPointsError when there are fewer points than clusters.
ClusterModel kmeans_fit(const FeatureMatrix& features, const KMeansOptions& options);

/// Nearest center per column; ties go to the smallest label.
std::vector<std::int32_t> assign_nearest(const FeatureMatrix& features, const Eigen::MatrixXd& centers,
                                         Metric metric);

/// Sum of squared Euclidean distances from each point to its labelled center.
double kmeans_objective(const FeatureMatrix& features, const Eigen::MatrixXd& centers,
                        const std::vector<std::int32_t>& labels);

/// JSON sidecar: {"k":K,"centers":[[...],...],"labels":[...]}, one inner
/// array of C values per center.
void write_cluster_json(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel read_cluster_json(const std::filesystem::path& path);

}  // namespace mst
