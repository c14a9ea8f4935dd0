#pragma once

#include <filesystem>

#include "mst/graph_matching.hpp"

namespace mst {

/// Label field as an NPY `<i4` array of shape (H, W).
void write_labels_npy(const LabelField& labels, const std::filesystem::path& path);
LabelField read_labels_npy(const std::filesystem::path& path);

/// Paletted 8-bit PNG cluster map, one colour per label (labels <= 255).
void write_labels_png(const LabelField& labels, const std::filesystem::path& path);

}  // namespace mst
