#include "mst/pipeline.hpp"

#include <chrono>
#include <string>

#include "mst/errors.hpp"
#include "mst/label_io.hpp"
#include "mst/metrics.hpp"
#include "mst/parallel.hpp"
#include "mst/simd/kernels.hpp"

namespace mst {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd gather_columns(const FeatureMatrix& m, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.channels()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto src = m.column(cols[j]);
    for (std::size_t c = 0; c < src.size(); ++c) {
      out(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) = src[c];
    }
  }
  return out;
}

QualityMetrics quality(const FeatureMap& output, const FeatureMap& content, const FeatureMatrix& style) {
  FeatureBundle out_b;
  FeatureBundle content_b;
  FeatureBundle style_b;
  out_b.add("conv4_1", output);
  content_b.add("conv4_1", content);
  style_b.add("conv4_1", from_matrix(style, 1, style.columns()));
  QualityMetrics q;
  q.content_loss = content_loss(out_b, content_b);
  q.style_loss = style_loss(out_b, style_b);
  q.total = q.content_loss + kDefaultStyleWeight * q.style_loss;
  return q;
}

}  // namespace

FeatureMatrix stack_styles(const std::vector<FeatureMap>& styles) {
  if (styles.empty()) throw ArgumentError("at least one style feature map is required");
  FeatureMatrix all = as_matrix(styles.front());
  for (std::size_t i = 1; i < styles.size(); ++i) all = all.concatenated(as_matrix(styles[i]));
  return all;
}

MstResult run_mst(const FeatureMap& content, const std::vector<FeatureMap>& styles, const MstOptions& options) {
  const auto t_start = Clock::now();
  for (const auto& s : styles) {
    if (s.channels() != content.channels()) {
      throw ChannelMismatchError("content has " + std::to_string(content.channels()) + " channels, style has " +
                                 std::to_string(s.channels()));
    }
  }
  options.transform.validate(options.k);
  const FeatureMatrix style = stack_styles(styles);
  const FeatureMatrix content_m = as_matrix(content);
  const std::size_t h = content.height();
  const std::size_t w = content.width();

  MstResult r;
  auto t = Clock::now();
  r.clusters = kmeans_fit(style, {options.k, options.seed, options.max_iters});
  r.timing.cluster = seconds_since(t);

  t = Clock::now();
  const DataCost costs = build_data_cost(content_m, r.clusters.centers, options.energy);
  r.labels = solve_labeling(costs, h, w, options.energy);
  r.energy = total_energy(r.labels, costs, options.energy);
  r.timing.match = seconds_since(t);

  t = Clock::now();
  std::vector<std::vector<std::size_t>> style_members(options.k);
  for (std::size_t i = 0; i < r.clusters.labels.size(); ++i) {
    style_members[static_cast<std::size_t>(r.clusters.labels[i])].push_back(i);
  }
  const auto groups = gather_groups(r.labels);
  r.matched_sizes.assign(options.k, 0);
  std::vector<PlacedGroup> placed(groups.size());
  parallel_for(groups.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t gi = b; gi < e; ++gi) {
      const auto& g = groups[gi];
      GroupPair pair{gather_columns(content_m, g.positions),
                     gather_columns(style, style_members[static_cast<std::size_t>(g.label)]), g.positions};
      const Eigen::MatrixXd transferred = options.transform.mode == TransformMode::kWct
                                              ? wct_group(pair, options.transform.eig_floor)
                                              : adain_group(pair);
      placed[gi] = {g.positions, blend(transferred, pair.content, options.transform.alpha_for(g.label))};
    }
  });
  for (const auto& g : groups) r.matched_sizes[static_cast<std::size_t>(g.label)] = g.positions.size();
  r.output = assemble(placed, h, w);
  r.timing.transform = seconds_since(t);
  r.timing.total = seconds_since(t_start);

  r.metrics = quality(r.output, content, style);
  return r;
}

nlohmann::json make_report(const MstResult& r, const PipelineConfig& config) {
  nlohmann::json j;
  j["output"] = config.output.string();
  j["k"] = config.options.k;
  j["energy"] = r.energy;
  j["cluster_sizes"] = r.clusters.counts;
  j["matched_sizes"] = r.matched_sizes;
  j["kmeans_iterations"] = r.clusters.iterations;
  j["timing"] = {{"cluster", r.timing.cluster},
                 {"match", r.timing.match},
                 {"transform", r.timing.transform},
                 {"total", r.timing.total}};
  j["metrics"] = {{"content_loss", r.metrics.content_loss},
                  {"style_loss", r.metrics.style_loss},
                  {"total", r.metrics.total},
                  {"energy", r.energy}};
  j["simd"] = std::string(simd::level_name(simd::active().level));
  j["threads"] = config.threads;
  return j;
}

std::pair<MstResult, nlohmann::json> run_mst(const PipelineConfig& config) {
  set_thread_count(config.threads);
  const FeatureMap content = read_tensor(config.content);
  std::vector<FeatureMap> styles;
  styles.reserve(config.styles.size());
  for (const auto& p : config.styles) styles.push_back(read_tensor(p));

  MstResult result = run_mst(content, styles, config.options);
  write_tensor(result.output, config.output);
  if (config.save_labels) {
    if (config.save_labels->extension() == ".png") {
      write_labels_png(result.labels, *config.save_labels);
    } else {
      write_labels_npy(result.labels, *config.save_labels);
    }
  }
  if (config.save_clusters) write_cluster_json(result.clusters, *config.save_clusters);
  auto report = make_report(result, config);
  return {std::move(result), std::move(report)};
}

}  // namespace mst
