#include "mst/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "mst/errors.hpp"
#include "mst/parallel.hpp"
#include "mst/simd/kernels.hpp"

namespace mst {
namespace {

// Portable draw in [0, 1); std distributions are implementation-defined.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::span<const double> center_span(const Eigen::MatrixXd& centers, Eigen::Index k) {
  return {centers.col(k).data(), static_cast<std::size_t>(centers.rows())};
}

Eigen::MatrixXd kmeanspp_init(const FeatureMatrix& x, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.columns();
  const std::size_t c = x.channels();
  const auto& kern = simd::active();
  Eigen::MatrixXd centers(c, k);
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t col, std::size_t i) {
    chosen[i] = true;
    const auto v = x.column(i);
    for (std::size_t r = 0; r < c; ++r) centers(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = v[r];
  };

  take(0, std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))));
  std::vector<double> nearest(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) nearest[i] = kern.sqdist_fd(x.column(i).data(), centers.col(0).data(), c);
  });

  for (std::size_t j = 1; j < k; ++j) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double run = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        run += nearest[i];
        if (nearest[i] > 0.0 && run > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        // Rounding left target beyond the running sum: take the last candidate.
        for (std::size_t i = n; i-- > 0;) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    take(j, pick);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        nearest[i] = std::min(nearest[i], kern.sqdist_fd(x.column(i).data(), centers.col(static_cast<Eigen::Index>(j)).data(), c));
      }
    });
  }
  return centers;
}

std::vector<std::size_t> count_labels(const std::vector<std::int32_t>& labels, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (auto l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

// Moves the point farthest from its own center into each empty cluster and
// re-centers that cluster on it.
void repair_empty(const FeatureMatrix& x, Eigen::MatrixXd& centers, std::vector<std::int32_t>& labels) {
  const std::size_t k = static_cast<std::size_t>(centers.cols());
  const std::size_t c = x.channels();
  const auto& kern = simd::active();
  auto counts = count_labels(labels, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] > 0) continue;
    std::size_t best = x.columns();
    double best_d = -1.0;
    for (std::size_t i = 0; i < x.columns(); ++i) {
      const auto li = static_cast<std::size_t>(labels[i]);
      if (counts[li] < 2) continue;
      const double d = kern.sqdist_fd(x.column(i).data(), centers.col(static_cast<Eigen::Index>(li)).data(), c);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    --counts[static_cast<std::size_t>(labels[best])];
    labels[best] = static_cast<std::int32_t>(j);
    counts[j] = 1;
    const auto v = x.column(best);
    for (std::size_t r = 0; r < c; ++r) centers(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = v[r];
  }
}

Eigen::MatrixXd cluster_means(const FeatureMatrix& x, const std::vector<std::int32_t>& labels, std::size_t k) {
  const std::size_t c = x.channels();
  const auto& kern = simd::active();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < x.columns(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    kern.accumulate(sums.col(static_cast<Eigen::Index>(l)).data(), x.column(i).data(), c);
    ++counts[l];
  }
  for (std::size_t j = 0; j < k; ++j) sums.col(static_cast<Eigen::Index>(j)) /= static_cast<double>(counts[j]);
  return sums;
}

}  // namespace

std::vector<std::int32_t> assign_nearest(const FeatureMatrix& features, const Eigen::MatrixXd& centers,
                                         Metric metric) {
  if (centers.cols() < 1) throw ArgumentError("assign_nearest: need at least one center");
  if (static_cast<std::size_t>(centers.rows()) != features.channels()) {
    throw DimensionError("assign_nearest: centers have " + std::to_string(centers.rows()) + " rows, features have " +
                         std::to_string(features.channels()) + " channels");
  }
  const Eigen::Index k = centers.cols();
  std::vector<double> norms(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) norms[static_cast<std::size_t>(j)] = centers.col(j).norm();
  const auto& kern = simd::active();
  std::vector<std::int32_t> labels(features.columns());
  parallel_for(features.columns(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto xi = features.column(i);
      double best = std::numeric_limits<double>::infinity();
      std::int32_t arg = 0;
      for (Eigen::Index j = 0; j < k; ++j) {
        // Squared distance has the same argmin as the distance itself.
        const double d = metric == Metric::kEuclidean
                             ? kern.sqdist_fd(xi.data(), centers.col(j).data(), xi.size())
                             : point_center_distance(xi, center_span(centers, j), norms[static_cast<std::size_t>(j)],
                                                     Metric::kCosine);
        if (d < best) {
          best = d;
          arg = static_cast<std::int32_t>(j);
        }
      }
      labels[i] = arg;
    }
  });
  return labels;
}

double kmeans_objective(const FeatureMatrix& features, const Eigen::MatrixXd& centers,
                        const std::vector<std::int32_t>& labels) {
  const auto& kern = simd::active();
  std::vector<double> terms(features.columns());
  parallel_for(features.columns(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      terms[i] = kern.sqdist_fd(features.column(i).data(), centers.col(labels[i]).data(), features.channels());
    }
  });
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

ClusterModel kmeans_fit(const FeatureMatrix& features, const KMeansOptions& options) {
  const std::size_t k = options.k;
  const std::size_t n = features.columns();
  if (k == 0) throw ArgumentError("kmeans_fit: K must be at least 1");
  if (n < k) {
    throw TooFewPointsError("kmeans_fit: K=" + std::to_string(k) + " exceeds the " + std::to_string(n) +
                            " available feature vectors");
  }

  std::mt19937_64 rng(options.seed);
  ClusterModel model;
  model.k = k;
  Eigen::MatrixXd centers = kmeanspp_init(features, k, rng);
  auto labels = assign_nearest(features, centers, Metric::kEuclidean);
  repair_empty(features, centers, labels);

  for (std::size_t it = 0; it < options.max_iters; ++it) {
    centers = cluster_means(features, labels, k);
    model.objective.push_back(kmeans_objective(features, centers, labels));
    model.iterations = it + 1;
    auto next = assign_nearest(features, centers, Metric::kEuclidean);
    repair_empty(features, centers, next);
    if (next == labels) {
      model.converged = true;
      break;
    }
    labels = std::move(next);
  }
  if (!model.converged) {
    centers = cluster_means(features, labels, k);
    model.objective.push_back(kmeans_objective(features, centers, labels));
  }

  model.centers = std::move(centers);
  model.counts = count_labels(labels, k);
  model.labels = std::move(labels);
  return model;
}

void write_cluster_json(const ClusterModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["k"] = model.k;
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index col = 0; col < model.centers.cols(); ++col) {
    std::vector<double> v(model.centers.col(col).data(), model.centers.col(col).data() + model.centers.rows());
    centers.push_back(v);
  }
  j["centers"] = std::move(centers);
  j["labels"] = model.labels;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

ClusterModel read_cluster_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    ClusterModel m;
    m.k = j.at("k").get<std::size_t>();
    const auto centers = j.at("centers").get<std::vector<std::vector<double>>>();
    if (m.k == 0 || centers.size() != m.k) throw FormatError(path.string() + ": 'centers' must hold k arrays");
    const std::size_t c = centers.front().size();
    m.centers.resize(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(m.k));
    for (std::size_t col = 0; col < m.k; ++col) {
      if (centers[col].size() != c) throw FormatError(path.string() + ": ragged 'centers'");
      for (std::size_t r = 0; r < c; ++r) {
        m.centers(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = centers[col][r];
      }
    }
    m.labels = j.value("labels", std::vector<std::int32_t>{});
    m.counts.assign(m.k, 0);
    for (auto l : m.labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= m.k) throw FormatError(path.string() + ": label out of range");
      ++m.counts[static_cast<std::size_t>(l)];
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace mst
