#pragma once

// Shared helpers for the test binaries: seeded generators and scratch dirs.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mst/feature_io.hpp"
#include "mst/graph_matching.hpp"

namespace mst::test {

inline std::filesystem::path data_dir() {
#ifdef MST_TEST_DATA_DIR
  return MST_TEST_DATA_DIR;
#else
  return "tests/data";
#endif
}

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("mst_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<float> normal_floats(std::mt19937_64& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> dist(mean, sd);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(dist(rng));
  return v;
}

inline FeatureMap random_map(std::mt19937_64& rng, std::size_t c, std::size_t h, std::size_t w) {
  return {c, h, w, normal_floats(rng, c * h * w)};
}

inline FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t c, std::size_t n) {
  return {c, n, normal_floats(rng, c * n)};
}

inline DataCost random_costs(std::mt19937_64& rng, std::size_t k, std::size_t n, double lo = 0.0, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  DataCost costs(k, n);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t p = 0; p < n; ++p) costs(j, p) = dist(rng);
  }
  return costs;
}

}  // namespace mst::test
