#include "mst/graph_matching.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mst/errors.hpp"
#include "mst/parallel.hpp"

namespace mst {

LabelField::LabelField(std::size_t height, std::size_t width, std::int32_t fill)
    : height_(height), width_(width), labels_(height * width, fill) {}

LabelField::LabelField(std::size_t height, std::size_t width, std::vector<std::int32_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (labels_.size() != height * width) throw DimensionError("label field size does not match H*W");
}

DataCost::DataCost(std::size_t k, std::size_t positions) : k_(k), n_(positions), costs_(k * positions, 0.0) {}

DataCost::DataCost(std::size_t k, std::size_t positions, std::vector<double> row_major)
    : k_(k), n_(positions), costs_(std::move(row_major)) {
  if (costs_.size() != k * positions) throw DimensionError("data cost size does not match K*N");
}

DataCost build_data_cost(const FeatureMatrix& content, const Eigen::MatrixXd& centers, const EnergyParams& params) {
  if (static_cast<std::size_t>(centers.rows()) != content.channels()) {
    throw DimensionError("build_data_cost: centers have " + std::to_string(centers.rows()) +
                         " channels, content has " + std::to_string(content.channels()));
  }
  const std::size_t k = static_cast<std::size_t>(centers.cols());
  const std::size_t n = content.columns();
  DataCost costs(k, n);
  std::vector<double> norms(k);
  for (std::size_t j = 0; j < k; ++j) norms[j] = centers.col(static_cast<Eigen::Index>(j)).norm();
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const auto x = content.column(p);
      for (std::size_t j = 0; j < k; ++j) {
        const auto col = centers.col(static_cast<Eigen::Index>(j));
        costs(j, p) = point_center_distance(x, {col.data(), static_cast<std::size_t>(col.size())}, norms[j],
                                            params.metric);
      }
    }
  });
  return costs;
}

std::size_t discordant_pairs(const LabelField& f) {
  std::size_t count = 0;
  const std::size_t h = f.height();
  const std::size_t w = f.width();
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t p = r * w + c;
      if (c + 1 < w && f[p] != f[p + 1]) ++count;
      if (r + 1 < h && f[p] != f[p + w]) ++count;
    }
  }
  return count;
}

double total_energy(const LabelField& labels, const DataCost& costs, const EnergyParams& params) {
  if (labels.size() != costs.positions()) throw DimensionError("total_energy: label field and data cost disagree");
  double data = 0.0;
  for (std::size_t p = 0; p < labels.size(); ++p) data += costs(static_cast<std::size_t>(labels[p]), p);
  return data + params.lambda * static_cast<double>(discordant_pairs(labels));
}

LabelField argmin_labeling(const DataCost& costs, std::size_t height, std::size_t width) {
  LabelField f(height, width);
  for (std::size_t p = 0; p < costs.positions(); ++p) {
    std::int32_t best = 0;
    for (std::size_t k = 1; k < costs.labels(); ++k) {
      if (costs(k, p) < costs(static_cast<std::size_t>(best), p)) best = static_cast<std::int32_t>(k);
    }
    f[p] = best;
  }
  return f;
}

namespace {

// Calls visit(p, q) for every 4-neighbour pair once.
template <typename Visit>
void for_each_pair(std::size_t h, std::size_t w, Visit&& visit) {
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t p = r * w + c;
      if (c + 1 < w) visit(p, p + 1);
      if (r + 1 < h) visit(p, p + w);
    }
  }
}

// Exact two-label minimum: source side takes label 1, sink side label 0.
LabelField binary_cut(const DataCost& costs, std::size_t h, std::size_t w, double lambda, MaxFlowAlgorithm algo) {
  const std::size_t n = h * w;
  FlowNetwork net(n);
  for (std::size_t p = 0; p < n; ++p) net.add_terminal(p, costs(0, p), costs(1, p));
  if (lambda > 0.0) for_each_pair(h, w, [&](std::size_t p, std::size_t q) { net.add_edge(p, q, lambda, lambda); });
  const CutResult cut = solve_maxflow(net, algo);
  LabelField f(h, w);
  for (std::size_t p = 0; p < n; ++p) f[p] = cut.side[p] == Side::kSource ? 1 : 0;
  return f;
}

// One expansion move: every position may switch to `alpha` (source side)
// or keep its label (sink side). Discordant non-alpha pairs get an
// auxiliary node carrying the pair's current penalty.
LabelField expansion_move(const LabelField& f, std::int32_t alpha, const DataCost& costs, double lambda,
                          MaxFlowAlgorithm algo) {
  const std::size_t h = f.height();
  const std::size_t w = f.width();
  const std::size_t n = h * w;
  const auto a = static_cast<std::size_t>(alpha);
  FlowNetwork net(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (f[p] != alpha) net.add_terminal(p, costs(static_cast<std::size_t>(f[p]), p), costs(a, p));
  }
  for_each_pair(h, w, [&](std::size_t p, std::size_t q) {
    const bool p_alpha = f[p] == alpha;
    const bool q_alpha = f[q] == alpha;
    if (p_alpha && q_alpha) return;
    if (p_alpha) {
      net.add_terminal(q, lambda, 0.0);
    } else if (q_alpha) {
      net.add_terminal(p, lambda, 0.0);
    } else if (f[p] == f[q]) {
      net.add_edge(p, q, lambda, lambda);
    } else {
      const std::size_t aux = net.add_nodes(1);
      net.add_terminal(aux, lambda, 0.0);
      net.add_edge(p, aux, lambda, lambda);
      net.add_edge(aux, q, lambda, lambda);
    }
  });
  const CutResult cut = solve_maxflow(net, algo);
  LabelField next = f;
  for (std::size_t p = 0; p < n; ++p) {
    if (cut.side[p] == Side::kSource) next[p] = alpha;
  }
  return next;
}

void validate_labels(const LabelField& f, std::size_t k, std::size_t h, std::size_t w) {
  if (f.height() != h || f.width() != w) throw DimensionError("initial labeling has the wrong grid size");
  for (auto l : f.labels()) {
    if (l < 0 || static_cast<std::size_t>(l) >= k) throw ArgumentError("initial labeling has an out-of-range label");
  }
}

}  // namespace

LabelField solve_labeling(const DataCost& costs, std::size_t height, std::size_t width, const EnergyParams& params,
                          const std::optional<LabelField>& init, const SolveOptions& options, SolveStats* stats) {
  const std::size_t k = costs.labels();
  if (k == 0) throw ArgumentError("solve_labeling: need at least one label");
  if (costs.positions() != height * width) throw DimensionError("solve_labeling: data cost does not match grid");
  if (params.lambda < 0.0 || !std::isfinite(params.lambda)) throw ArgumentError("lambda must be finite and >= 0");
  if (init) validate_labels(*init, k, height, width);
  SolveStats local;
  SolveStats& st = stats ? *stats : local;

  if (k == 1) return LabelField(height, width, 0);

  // Keeps whichever of the candidate and the caller's start is lower.
  auto no_worse_than_init = [&](LabelField candidate) {
    if (init && total_energy(*init, costs, params) < total_energy(candidate, costs, params)) return *init;
    return candidate;
  };

  if (params.lambda == 0.0) return no_worse_than_init(argmin_labeling(costs, height, width));
  if (k == 2) {
    ++st.cuts;
    return no_worse_than_init(binary_cut(costs, height, width, params.lambda, options.maxflow));
  }

  std::vector<std::int32_t> order = options.label_order;
  if (order.empty()) {
    order.resize(k);
    std::iota(order.begin(), order.end(), 0);
  }
  for (auto l : order) {
    if (l < 0 || static_cast<std::size_t>(l) >= k) throw ArgumentError("label_order entry out of range");
  }

  LabelField f = init ? *init : argmin_labeling(costs, height, width);
  double energy = total_energy(f, costs, params);
  bool improved = true;
  while (improved) {
    improved = false;
    ++st.sweeps;
    for (std::int32_t alpha : order) {
      LabelField candidate = expansion_move(f, alpha, costs, params.lambda, options.maxflow);
      ++st.cuts;
      const double e = total_energy(candidate, costs, params);
      if (e < energy) {
        f = std::move(candidate);
        energy = e;
        improved = true;
        ++st.accepted_moves;
      }
    }
  }
  return f;
}

LabelField brute_force_labeling(const DataCost& costs, std::size_t height, std::size_t width,
                                const EnergyParams& params) {
  const std::size_t k = costs.labels();
  const std::size_t n = height * width;
  if (k == 0) throw ArgumentError("brute_force_labeling: need at least one label");
  if (costs.positions() != n) throw DimensionError("brute_force_labeling: data cost does not match grid");
  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    combos *= static_cast<double>(k);
    if (combos > 1e7) {
      throw InstanceTooLargeError("brute_force_labeling: " + std::to_string(k) + "^" + std::to_string(n) +
                                  " labelings exceed the 1e7 enumeration limit");
    }
  }

  LabelField current(height, width, 0);
  LabelField best = current;
  double best_energy = total_energy(current, costs, params);
  const auto top = static_cast<std::int32_t>(k);
  while (true) {
    std::size_t i = 0;
    while (i < n && ++current[i] == top) current[i++] = 0;
    if (i == n) break;
    const double e = total_energy(current, costs, params);
    if (e < best_energy) {
      best_energy = e;
      best = current;
    }
  }
  return best;
}

std::vector<PositionGroup> gather_groups(const LabelField& labels) {
  std::int32_t max_label = -1;
  for (auto l : labels.labels()) {
    if (l < 0) throw ArgumentError("gather_groups: negative label");
    max_label = std::max(max_label, l);
  }
  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(max_label + 1));
  for (std::size_t p = 0; p < labels.size(); ++p) buckets[static_cast<std::size_t>(labels[p])].push_back(p);
  std::vector<PositionGroup> groups;
  for (std::size_t l = 0; l < buckets.size(); ++l) {
    if (!buckets[l].empty()) groups.push_back({static_cast<std::int32_t>(l), std::move(buckets[l])});
  }
  return groups;
}

}  // namespace mst
