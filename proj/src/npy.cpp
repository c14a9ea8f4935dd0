#include "mst/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <regex>

#include "mst/errors.hpp"

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace mst::npy {
namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kAlign = 64;
constexpr std::size_t kGrowthAxisMaxDigits = 21;

std::string shape_repr(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  s += ")";
  return s;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

}  // namespace

std::size_t Header::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Header parse_header(const std::vector<std::uint8_t>& bytes, std::size_t& payload_offset) {
  if (bytes.size() < kMagicLen + 4 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw FormatError("not an NPY file (bad magic)");
  }
  const std::uint8_t major = bytes[6];
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = bytes[8] | (std::size_t{bytes[9]} << 8);
    prefix = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw FormatError("truncated NPY preamble");
    header_len = bytes[8] | (std::size_t{bytes[9]} << 8) | (std::size_t{bytes[10]} << 16) |
                 (std::size_t{bytes[11]} << 24);
    prefix = 12;
  } else {
    throw FormatError("unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) throw FormatError("truncated NPY header");
  const std::string dict(reinterpret_cast<const char*>(bytes.data() + prefix), header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex fortran_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;
  Header h;
  if (!std::regex_search(dict, m, descr_re)) throw FormatError("NPY header lacks 'descr'");
  h.descr = m[1];
  if (!std::regex_search(dict, m, fortran_re)) throw FormatError("NPY header lacks 'fortran_order'");
  h.fortran_order = m[1] == "True";
  if (!std::regex_search(dict, m, shape_re)) throw FormatError("NPY header lacks 'shape'");
  const std::string dims = m[1];
  static const std::regex int_re(R"(\s*(\d+)\s*(,|$))");
  for (auto it = std::sregex_iterator(dims.begin(), dims.end(), int_re); it != std::sregex_iterator(); ++it) {
    h.shape.push_back(std::stoull((*it)[1]));
  }
  // Any non-space, non-digit, non-comma character means a malformed tuple.
  if (dims.find_first_not_of("0123456789, ") != std::string::npos) {
    throw FormatError("malformed shape tuple '" + dims + "'");
  }
  payload_offset = prefix + header_len;
  return h;
}

std::vector<std::uint8_t> encode_header(const Header& header) {
  std::string dict = "{'descr': '" + header.descr + "', 'fortran_order': " +
                     (header.fortran_order ? "True" : "False") + ", 'shape': " + shape_repr(header.shape) + ", }";
  if (!header.shape.empty()) {
    const std::size_t axis = header.fortran_order ? header.shape.size() - 1 : 0;
    dict.append(kGrowthAxisMaxDigits - std::to_string(header.shape[axis]).size(), ' ');
  }
  const std::size_t hlen = dict.size() + 1;
  const std::size_t padlen = kAlign - ((kMagicLen + 2 + 2 + hlen) % kAlign);
  const std::size_t total = hlen + padlen;
  if (total > 0xFFFF) throw FormatError("NPY header too long for version 1.0");

  std::vector<std::uint8_t> out(kMagic, kMagic + kMagicLen);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(total & 0xFF));
  out.push_back(static_cast<std::uint8_t>(total >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  out.insert(out.end(), padlen, ' ');
  out.push_back('\n');
  return out;
}

Array read(const std::filesystem::path& path) {
  auto bytes = slurp(path);
  std::size_t offset = 0;
  Array a;
  a.header = parse_header(bytes, offset);
  a.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  return a;
}

void write(const std::filesystem::path& path, const Header& header, const void* data, std::size_t nbytes) {
  const auto head = encode_header(header);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(nbytes));
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::int32_t> read_int_array(const std::filesystem::path& path, std::vector<std::size_t>& shape) {
  const Array a = read(path);
  if (a.header.fortran_order) throw FormatError("Fortran-ordered arrays are not supported");
  const std::size_t n = a.header.element_count();
  std::vector<std::int32_t> values(n);
  if (a.header.descr == "<i4") {
    if (a.payload.size() != n * 4) throw FormatError("payload size does not match shape");
    std::memcpy(values.data(), a.payload.data(), n * 4);
  } else if (a.header.descr == "<i8") {
    if (a.payload.size() != n * 8) throw FormatError("payload size does not match shape");
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t v;
      std::memcpy(&v, a.payload.data() + i * 8, 8);
      values[i] = static_cast<std::int32_t>(v);
    }
  } else {
    throw DtypeError("expected integer array (<i4 or <i8), got " + a.header.descr);
  }
  shape = a.header.shape;
  return values;
}

void write_int_array(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
                     const std::vector<std::int32_t>& values) {
  write(path, Header{"<i4", false, shape}, values.data(), values.size() * sizeof(std::int32_t));
}

}  // namespace mst::npy
