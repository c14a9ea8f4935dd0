#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mst/feature_io.hpp"

namespace mst {

/// Content features matched to one style cluster, and that cluster's style
/// features. Columns are feature vectors.
struct GroupPair {
  Eigen::MatrixXd content;                 // C x M
  Eigen::MatrixXd style;                   // C x N_k
  std::vector<std::size_t> content_positions;
};

enum class TransformMode { kWct, kAdain };

TransformMode parse_transform_mode(std::string_view name);

struct TransformParams {
  TransformMode mode = TransformMode::kWct;
  /// One weight for all clusters, or one per cluster.
  std::vector<double> alpha{1.0};
  double eig_floor = 1e-8;

  /// Weight for cluster `label`; throws ArgumentError if out of range.
  double alpha_for(std::int32_t label) const;
  void validate(std::size_t k) const;
};

struct Centered {
  Eigen::MatrixXd centered;
  Eigen::VectorXd mean;
};

Centered mean_center(const Eigen::MatrixXd& features);

/// (1/M) X X^T, symmetrized.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& centered);

struct Whitened {
  Eigen::MatrixXd whitened;
  Eigen::MatrixXd whitening;  // E D^{-1/2} E^T of the content covariance
};

/// Eigenvalues below eig_floor are raised to eig_floor before inversion.
Whitened whiten(const Eigen::MatrixXd& centered, double eig_floor);

/// E D^{1/2} E^T of the style covariance.
Eigen::MatrixXd coloring_matrix(const Eigen::MatrixXd& style_centered, double eig_floor);

Eigen::MatrixXd color(const Eigen::MatrixXd& whitened, const Eigen::MatrixXd& style_centered, double eig_floor);

/// Whitening-coloring transform of the content group onto the style group's
/// mean and covariance. Groups with fewer than two content or style vectors
/// only get their mean shifted.
Eigen::MatrixXd wct_group(const GroupPair& pair, double eig_floor = 1e-8);

/// Per-channel mean/std replacement (std with 1/M normalization, content
/// std floored at 1e-8).
Eigen::MatrixXd adain_group(const GroupPair& pair);

/// alpha * transferred + (1 - alpha) * content. alpha must lie in [0, 1];
/// the endpoints return the corresponding input unchanged.
Eigen::MatrixXd blend(const Eigen::MatrixXd& transferred, const Eigen::MatrixXd& content, double alpha);

struct PlacedGroup {
  std::vector<std::size_t> positions;
  Eigen::MatrixXd features;  // C x positions.size()
};

/// Scatters group columns back onto the H x W grid. Throws PartitionError
/// unless the position lists cover every position exactly once.
FeatureMap assemble(const std::vector<PlacedGroup>& groups, std::size_t height, std::size_t width);

}  // namespace mst
