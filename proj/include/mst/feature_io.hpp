#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mst {

/// Dense C x H x W float tensor, channel-major (the layout of an NPY
/// array with shape (C, H, W)).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t channels, std::size_t height, std::size_t width);
  FeatureMap(std::size_t channels, std::size_t height, std::size_t width, std::vector<float> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t positions() const { return height_ * width_; }

  float& at(std::size_t c, std::size_t h, std::size_t w) { return data_[(c * height_ + h) * width_ + w]; }
  float at(std::size_t c, std::size_t h, std::size_t w) const { return data_[(c * height_ + h) * width_ + w]; }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> data_;
};

/// C x N matrix of feature vectors, one column per spatial position.
/// Columns are stored contiguously so a position's feature vector is a
/// single span; column p is grid position (p / W, p % W).
class FeatureMatrix {
 public:
  using EigenMap = Eigen::Map<const Eigen::MatrixXf>;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t channels, std::size_t columns);
  FeatureMatrix(std::size_t channels, std::size_t columns, std::vector<float> column_major);

  std::size_t channels() const { return channels_; }
  std::size_t columns() const { return columns_; }

  std::span<const float> column(std::size_t p) const { return {data_.data() + p * channels_, channels_}; }
  std::span<float> column(std::size_t p) { return {data_.data() + p * channels_, channels_}; }

  float operator()(std::size_t c, std::size_t p) const { return data_[p * channels_ + c]; }
  float& operator()(std::size_t c, std::size_t p) { return data_[p * channels_ + c]; }

  EigenMap eigen() const {
    return {data_.data(), static_cast<Eigen::Index>(channels_), static_cast<Eigen::Index>(columns_)};
  }
  std::span<const float> data() const { return data_; }

  /// Columns of `this` followed by the columns of `other`.
  FeatureMatrix concatenated(const FeatureMatrix& other) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t columns_ = 0;
  std::vector<float> data_;
};

/// Loads a `<f4` NPY tensor of shape (C,H,W) or (1,C,H,W).
/// Throws FormatError, DtypeError, DataError (non-finite values) or IoError.
FeatureMap read_tensor(const std::filesystem::path& path);

void write_tensor(const FeatureMap& map, const std::filesystem::path& path);

FeatureMatrix as_matrix(const FeatureMap& map);

/// Throws DimensionError unless height * width == mat.columns().
FeatureMap from_matrix(const FeatureMatrix& mat, std::size_t height, std::size_t width);

}  // namespace mst
