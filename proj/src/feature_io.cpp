#include "mst/feature_io.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "mst/errors.hpp"
#include "mst/npy.hpp"

namespace mst {

FeatureMap::FeatureMap(std::size_t channels, std::size_t height, std::size_t width)
    : channels_(channels), height_(height), width_(width), data_(channels * height * width, 0.0f) {}

FeatureMap::FeatureMap(std::size_t channels, std::size_t height, std::size_t width, std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != channels * height * width) {
    throw DimensionError("feature map data length " + std::to_string(data_.size()) + " != C*H*W = " +
                         std::to_string(channels * height * width));
  }
}

FeatureMatrix::FeatureMatrix(std::size_t channels, std::size_t columns)
    : channels_(channels), columns_(columns), data_(channels * columns, 0.0f) {}

FeatureMatrix::FeatureMatrix(std::size_t channels, std::size_t columns, std::vector<float> column_major)
    : channels_(channels), columns_(columns), data_(std::move(column_major)) {
  if (data_.size() != channels * columns) throw DimensionError("feature matrix data length mismatch");
}

FeatureMatrix FeatureMatrix::concatenated(const FeatureMatrix& other) const {
  if (other.channels_ != channels_) {
    throw ChannelMismatchError("cannot concatenate " + std::to_string(channels_) + "-channel and " +
                               std::to_string(other.channels_) + "-channel features");
  }
  std::vector<float> joined(data_);
  joined.insert(joined.end(), other.data_.begin(), other.data_.end());
  return {channels_, columns_ + other.columns_, std::move(joined)};
}

FeatureMap read_tensor(const std::filesystem::path& path) {
  const npy::Array a = npy::read(path);
  if (a.header.descr != "<f4") {
    throw DtypeError(path.string() + ": expected dtype '<f4', got '" + a.header.descr + "'");
  }
  if (a.header.fortran_order) throw FormatError(path.string() + ": Fortran-ordered arrays are not supported");
  auto shape = a.header.shape;
  if (shape.size() == 4 && shape[0] == 1) shape.erase(shape.begin());
  if (shape.size() != 3) throw FormatError(path.string() + ": expected shape (C,H,W) or (1,C,H,W)");
  if (shape[0] == 0 || shape[1] == 0 || shape[2] == 0) throw FormatError(path.string() + ": empty dimension");
  const std::size_t n = shape[0] * shape[1] * shape[2];
  if (a.payload.size() != n * sizeof(float)) {
    throw FormatError(path.string() + ": payload holds " + std::to_string(a.payload.size()) + " bytes, expected " +
                      std::to_string(n * sizeof(float)));
  }
  std::vector<float> values(n);
  std::memcpy(values.data(), a.payload.data(), a.payload.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError(path.string() + ": non-finite value at flat index " + std::to_string(i));
    }
  }
  return {shape[0], shape[1], shape[2], std::move(values)};
}

void write_tensor(const FeatureMap& map, const std::filesystem::path& path) {
  const npy::Header header{"<f4", false, {map.channels(), map.height(), map.width()}};
  npy::write(path, header, map.data().data(), map.data().size() * sizeof(float));
}

FeatureMatrix as_matrix(const FeatureMap& map) {
  const std::size_t c_count = map.channels();
  const std::size_t n = map.positions();
  FeatureMatrix out(c_count, n);
  const auto src = map.data();
  for (std::size_t c = 0; c < c_count; ++c) {
    const float* plane = src.data() + c * n;
    for (std::size_t p = 0; p < n; ++p) out(c, p) = plane[p];
  }
  return out;
}

FeatureMap from_matrix(const FeatureMatrix& mat, std::size_t height, std::size_t width) {
  if (height * width != mat.columns()) {
    throw DimensionError("from_matrix: " + std::to_string(height) + "x" + std::to_string(width) +
                         " grid does not match " + std::to_string(mat.columns()) + " columns");
  }
  FeatureMap out(mat.channels(), height, width);
  auto dst = out.data();
  const std::size_t n = mat.columns();
  for (std::size_t c = 0; c < mat.channels(); ++c) {
    for (std::size_t p = 0; p < n; ++p) dst[c * n + p] = mat(c, p);
  }
  return out;
}

}  // namespace mst
