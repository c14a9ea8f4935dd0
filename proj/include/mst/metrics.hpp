#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mst/feature_io.hpp"

namespace mst {

/// Encoder features at up to four layers (conv1_1, conv2_1, conv3_1, conv4_1).
class FeatureBundle {
 public:
  /// Throws ArgumentError on an unknown or repeated layer name.
  void add(const std::string& layer, FeatureMap features);

  const FeatureMap* find(const std::string& layer) const;
  const std::vector<std::pair<std::string, FeatureMap>>& layers() const { return layers_; }
  bool empty() const { return layers_.empty(); }

  static bool is_known_layer(const std::string& layer);

 private:
  std::vector<std::pair<std::string, FeatureMap>> layers_;
};

inline constexpr double kDefaultStyleWeight = 1e-2;

/// L2 norm of the difference of the conv4_1 features.
double content_loss(const FeatureBundle& a, const FeatureBundle& b);

/// Sum over layers of |mu_a - mu_b| + |sigma_a - sigma_b| on per-channel
/// spatial statistics (population variance, floored at 1e-8 before the
/// square root). Both bundles must hold the same layers.
double style_loss(const FeatureBundle& a, const FeatureBundle& b);

double perceptual_total(const FeatureBundle& a, const FeatureBundle& content_ref, const FeatureBundle& style_ref,
                        double gamma = kDefaultStyleWeight);

}  // namespace mst
