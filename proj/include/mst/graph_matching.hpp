#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mst/distance.hpp"
#include "mst/feature_io.hpp"
#include "mst/maxflow.hpp"

namespace mst {

/// Potts labeling energy over the 4-connected content grid.
struct EnergyParams {
  double lambda = 0.1;
  Metric metric = Metric::kCosine;
};

/// Style-cluster label per content position, row-major over (h, w).
class LabelField {
 public:
  LabelField() = default;
  LabelField(std::size_t height, std::size_t width, std::int32_t fill = 0);
  LabelField(std::size_t height, std::size_t width, std::vector<std::int32_t> labels);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return labels_.size(); }
  std::int32_t operator[](std::size_t p) const { return labels_[p]; }
  std::int32_t& operator[](std::size_t p) { return labels_[p]; }
  const std::vector<std::int32_t>& labels() const { return labels_; }

  bool operator==(const LabelField&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::int32_t> labels_;
};

/// K x N unary costs; cost(k, p) is the distance from content position p to
/// style center k.
class DataCost {
 public:
  DataCost() = default;
  DataCost(std::size_t k, std::size_t positions);
  DataCost(std::size_t k, std::size_t positions, std::vector<double> row_major);

  std::size_t labels() const { return k_; }
  std::size_t positions() const { return n_; }
  double operator()(std::size_t k, std::size_t p) const { return costs_[k * n_ + p]; }
  double& operator()(std::size_t k, std::size_t p) { return costs_[k * n_ + p]; }

 private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::vector<double> costs_;
};

DataCost build_data_cost(const FeatureMatrix& content, const Eigen::MatrixXd& centers, const EnergyParams& params);

/// Number of 4-neighbour pairs (each counted once) with different labels.
std::size_t discordant_pairs(const LabelField& labels);

/// sum_p cost(f_p, p) + lambda * discordant_pairs(f).
double total_energy(const LabelField& labels, const DataCost& costs, const EnergyParams& params);

/// Per-position argmin of the data cost, ties to the smallest label.
LabelField argmin_labeling(const DataCost& costs, std::size_t height, std::size_t width);

struct SolveOptions {
  MaxFlowAlgorithm maxflow = MaxFlowAlgorithm::kBoykovKolmogorov;
  /// Expansion order for K >= 3; empty means 0..K-1.
  std::vector<std::int32_t> label_order;
};

struct SolveStats {
  std::size_t sweeps = 0;
  std::size_t cuts = 0;
  std::size_t accepted_moves = 0;
};

/// Minimizes the Potts energy. K = 1 is trivial, lambda = 0 is the
/// per-position argmin, K = 2 is one exact binary cut, K >= 3 runs
/// alpha-expansion sweeps from `init` (default: the argmin labeling) until a
/// full sweep gives no decrease. The result never has higher energy than
/// the initialization.
LabelField solve_labeling(const DataCost& costs, std::size_t height, std::size_t width, const EnergyParams& params,
                          const std::optional<LabelField>& init = std::nullopt, const SolveOptions& options = {},
                          SolveStats* stats = nullptr);

/// Exact minimum by enumeration; ties go to the first labeling in
/// odometer order (position 0 varies fastest). Throws
/// InstanceTooLargeError when K^(H*W) > 1e7.
LabelField brute_force_labeling(const DataCost& costs, std::size_t height, std::size_t width,
                                const EnergyParams& params);

struct PositionGroup {
  std::int32_t label;
  std::vector<std::size_t> positions;  // ascending
};

/// Positions grouped by label, ascending label order, empty groups omitted.
std::vector<PositionGroup> gather_groups(const LabelField& labels);

}  // namespace mst
