#include "mst/label_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "mst/errors.hpp"
#include "mst/npy.hpp"

namespace mst {

void write_labels_npy(const LabelField& labels, const std::filesystem::path& path) {
  npy::write_int_array(path, {labels.height(), labels.width()}, labels.labels());
}

LabelField read_labels_npy(const std::filesystem::path& path) {
  std::vector<std::size_t> shape;
  auto values = npy::read_int_array(path, shape);
  if (shape.size() != 2) throw FormatError(path.string() + ": label array must have shape (H, W)");
  for (auto v : values) {
    if (v < 0) throw DataError(path.string() + ": negative label");
  }
  return {shape[0], shape[1], std::move(values)};
}

namespace {

// Qualitative palette; wraps around for larger label counts.
constexpr std::array<std::array<png_byte, 3>, 12> kPalette{{
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}, {148, 103, 189}, {140, 86, 75},
    {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207}, {174, 199, 232}, {255, 187, 120},
}};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

}  // namespace

namespace {

// Kept free of locals that change between setjmp and longjmp.
[[gnu::noinline]] void encode_png(std::FILE* file, const LabelField& labels, const std::vector<png_color>& palette,
                const std::filesystem::path& path) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG " + path.string());
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(labels.width()), static_cast<png_uint_32>(labels.height()), 8,
               PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  png_write_info(png, info);
  std::vector<png_byte> row(labels.width());
  for (std::size_t r = 0; r < labels.height(); ++r) {
    for (std::size_t c = 0; c < labels.width(); ++c) row[c] = static_cast<png_byte>(labels[r * labels.width() + c]);
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_labels_png(const LabelField& labels, const std::filesystem::path& path) {
  std::int32_t max_label = 0;
  for (auto l : labels.labels()) {
    if (l < 0 || l > 255) throw ArgumentError("write_labels_png: labels must lie in [0, 255]");
    max_label = std::max(max_label, l);
  }
  std::vector<png_color> palette(static_cast<std::size_t>(max_label) + 1);
  for (std::size_t i = 0; i < palette.size(); ++i) {
    const auto& c = kPalette[i % kPalette.size()];
    palette[i] = {c[0], c[1], c[2]};
  }
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  encode_png(file.get(), labels, palette, path);
}

}  // namespace mst
