#include "mst/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mst/errors.hpp"

namespace mst {
namespace {

constexpr std::array<const char*, 4> kLayers{"conv1_1", "conv2_1", "conv3_1", "conv4_1"};

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> sigma;
};

ChannelStats channel_stats(const FeatureMap& m) {
  const std::size_t n = m.positions();
  ChannelStats s{std::vector<double>(m.channels()), std::vector<double>(m.channels())};
  const auto data = m.data();
  for (std::size_t c = 0; c < m.channels(); ++c) {
    const float* plane = data.data() + c * n;
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) sum += plane[p];
    const double mu = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = plane[p] - mu;
      sq += d * d;
    }
    s.mean[c] = mu;
    s.sigma[c] = std::sqrt(std::max(sq / static_cast<double>(n), 1e-8));
  }
  return s;
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace

bool FeatureBundle::is_known_layer(const std::string& layer) {
  return std::find(kLayers.begin(), kLayers.end(), layer) != kLayers.end();
}

void FeatureBundle::add(const std::string& layer, FeatureMap features) {
  if (!is_known_layer(layer)) throw ArgumentError("unknown layer '" + layer + "' (expected conv1_1..conv4_1)");
  if (find(layer) != nullptr) throw ArgumentError("layer '" + layer + "' given twice");
  layers_.emplace_back(layer, std::move(features));
}

const FeatureMap* FeatureBundle::find(const std::string& layer) const {
  for (const auto& [name, map] : layers_) {
    if (name == layer) return &map;
  }
  return nullptr;
}

double content_loss(const FeatureBundle& a, const FeatureBundle& b) {
  const FeatureMap* fa = a.find("conv4_1");
  const FeatureMap* fb = b.find("conv4_1");
  if (fa == nullptr || fb == nullptr) throw ArgumentError("content loss needs conv4_1 in both bundles");
  if (fa->channels() != fb->channels() || fa->height() != fb->height() || fa->width() != fb->width()) {
    throw DimensionError("content loss: conv4_1 shapes differ");
  }
  const auto da = fa->data();
  const auto db = fb->data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double style_loss(const FeatureBundle& a, const FeatureBundle& b) {
  if (a.empty()) throw ArgumentError("style loss needs at least one layer");
  if (a.layers().size() != b.layers().size()) throw ArgumentError("style loss: bundles hold different layers");
  double total = 0.0;
  for (const char* layer : kLayers) {
    const FeatureMap* fa = a.find(layer);
    const FeatureMap* fb = b.find(layer);
    if ((fa == nullptr) != (fb == nullptr)) throw ArgumentError(std::string("style loss: ") + layer + " missing");
    if (fa == nullptr) continue;
    if (fa->channels() != fb->channels()) throw DimensionError(std::string("style loss: channel mismatch at ") + layer);
    const ChannelStats sa = channel_stats(*fa);
    const ChannelStats sb = channel_stats(*fb);
    total += l2_diff(sa.mean, sb.mean) + l2_diff(sa.sigma, sb.sigma);
  }
  return total;
}

double perceptual_total(const FeatureBundle& a, const FeatureBundle& content_ref, const FeatureBundle& style_ref,
                        double gamma) {
  return content_loss(a, content_ref) + gamma * style_loss(a, style_ref);
}

}  // namespace mst
