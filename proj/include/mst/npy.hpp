#pragma once

// Minimal NPY (v1.0) array files: little-endian float32 / int32 payloads,
// C order. Headers are written byte-for-byte the way numpy.save writes them.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mst::npy {

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;

  std::size_t element_count() const;
};

struct Array {
  Header header;
  std::vector<std::uint8_t> payload;
};

/// Parses the NPY preamble of `bytes`; returns the header and the payload
/// offset. Throws FormatError.
Header parse_header(const std::vector<std::uint8_t>& bytes, std::size_t& payload_offset);

/// numpy-compatible header block (magic, version, length, padded dict).
std::vector<std::uint8_t> encode_header(const Header& header);

Array read(const std::filesystem::path& path);

void write(const std::filesystem::path& path, const Header& header, const void* data, std::size_t nbytes);

std::vector<std::int32_t> read_int_array(const std::filesystem::path& path, std::vector<std::size_t>& shape);

void write_int_array(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
                     const std::vector<std::int32_t>& values);

}  // namespace mst::npy
