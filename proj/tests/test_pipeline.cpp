#include <doctest.h>

#include <fstream>

#include "mst/errors.hpp"
#include "mst/label_io.hpp"
#include "mst/npy.hpp"
#include "mst/parallel.hpp"
#include "mst/pipeline.hpp"
#include "support.hpp"

using namespace mst;

namespace {

Eigen::MatrixXd to_eigen(const FeatureMatrix& m) { return m.eigen().cast<double>(); }

Eigen::MatrixXd columns(const FeatureMatrix& m, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.channels()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.eigen().col(static_cast<Eigen::Index>(idx[j])).cast<double>();
  return out;
}

// Style map whose columns come from `modes` well-separated Gaussian blobs.
FeatureMap blob_style(std::mt19937_64& rng, std::size_t c, std::size_t h, std::size_t w, int modes) {
  std::normal_distribution<double> n01;
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(modes), std::vector<double>(c));
  for (auto& ctr : centers)
    for (auto& v : ctr) v = 6.0 * n01(rng);
  FeatureMap m(c, h, w);
  for (std::size_t p = 0; p < h * w; ++p) {
    const auto& ctr = centers[p % static_cast<std::size_t>(modes)];
    for (std::size_t ch = 0; ch < c; ++ch) m.at(ch, p / w, p % w) = static_cast<float>(ctr[ch] + n01(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("K = 1 reduces to a single global WCT") {
  std::mt19937_64 rng(51);
  const FeatureMap content = test::random_map(rng, 8, 12, 10);
  const FeatureMap style = test::random_map(rng, 8, 11, 11);
  MstOptions opt;
  opt.k = 1;
  const MstResult r = run_mst(content, {style}, opt);
  CHECK(r.labels == LabelField(12, 10, 0));
  const Eigen::MatrixXd global = wct_group({to_eigen(as_matrix(content)), to_eigen(as_matrix(style)), {}});
  CHECK((to_eigen(as_matrix(r.output)) - global).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("alpha = 0 returns the content and alpha = 1 the pure transfer") {
  std::mt19937_64 rng(52);
  const FeatureMap content = test::random_map(rng, 6, 9, 9);
  const FeatureMap style = blob_style(rng, 6, 10, 10, 3);
  MstOptions opt;
  opt.k = 3;
  opt.transform.alpha = {0.0};
  CHECK(run_mst(content, {style}, opt).output == content);

  opt.transform.alpha = {1.0};
  const MstResult r = run_mst(content, {style}, opt);
  const FeatureMatrix cm = as_matrix(content), sm = as_matrix(style);
  std::vector<std::vector<std::size_t>> members(3);
  for (std::size_t i = 0; i < r.clusters.labels.size(); ++i) members[static_cast<std::size_t>(r.clusters.labels[i])].push_back(i);
  std::vector<PlacedGroup> placed;
  for (const auto& g : gather_groups(r.labels)) {
    placed.push_back({g.positions, wct_group({columns(cm, g.positions), columns(sm, members[static_cast<std::size_t>(g.label)]), {}})});
  }
  CHECK(r.output == assemble(placed, 9, 9));

  // Per-cluster weights: a zero-weight cluster keeps its content columns.
  opt.transform.alpha = {0.0, 1.0, 1.0};
  const MstResult mixed = run_mst(content, {style}, opt);
  const FeatureMatrix om = as_matrix(mixed.output);
  for (std::size_t p = 0; p < 81; ++p) {
    if (mixed.labels[p] != 0) continue;
    for (std::size_t c = 0; c < 6; ++c) CHECK(om(c, p) == cm(c, p));
  }
}

TEST_CASE("pipeline result invariants") {
  std::mt19937_64 rng(53);
  const FeatureMap content = test::random_map(rng, 5, 7, 8);
  const FeatureMap s1 = blob_style(rng, 5, 6, 6, 2);
  const FeatureMap s2 = blob_style(rng, 5, 4, 9, 2);
  for (auto mode : {TransformMode::kWct, TransformMode::kAdain}) {
    MstOptions opt;
    opt.k = 4;
    opt.transform.mode = mode;
    const MstResult r = run_mst(content, {s1, s2}, opt);
    CHECK(r.output.channels() == 5);
    CHECK(r.output.height() == 7);
    CHECK(r.output.width() == 8);
    std::size_t total = 0;
    for (auto n : r.matched_sizes) total += n;
    CHECK(total == 56);
    CHECK(r.clusters.labels.size() == 72);
    const DataCost costs = build_data_cost(as_matrix(content), r.clusters.centers, opt.energy);
    CHECK(r.energy == total_energy(r.labels, costs, opt.energy));
    CHECK(r.energy <= total_energy(argmin_labeling(costs, 7, 8), costs, opt.energy));
    for (float v : r.output.data()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("stack_styles concatenates in order") {
  const FeatureMap a(2, 1, 2, {1, 2, 3, 4});
  const FeatureMap b(2, 1, 1, {5, 6});
  const FeatureMatrix m = stack_styles({a, b});
  REQUIRE(m.columns() == 3);
  CHECK(m(0, 0) == 1);
  CHECK(m(1, 1) == 4);
  CHECK(m(0, 2) == 5);
  CHECK(m(1, 2) == 6);
  CHECK_THROWS_AS(stack_styles({}), ArgumentError);
}

TEST_CASE("pipeline input errors") {
  std::mt19937_64 rng(54);
  const FeatureMap content = test::random_map(rng, 4, 3, 3);
  MstOptions opt;
  CHECK_THROWS_AS(run_mst(content, {test::random_map(rng, 5, 3, 3)}, opt), ChannelMismatchError);
  opt.k = 5;
  CHECK_THROWS_AS(run_mst(content, {test::random_map(rng, 4, 1, 4)}, opt), TooFewPointsError);
  opt.k = 2;
  opt.transform.alpha = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(run_mst(content, {test::random_map(rng, 4, 3, 3)}, opt), ArgumentError);
}

TEST_CASE("pipeline is deterministic across runs and thread counts") {
  std::mt19937_64 rng(55);
  const FeatureMap content = test::random_map(rng, 16, 14, 14);
  const FeatureMap style = blob_style(rng, 16, 15, 15, 4);
  MstOptions opt;
  opt.k = 4;
  opt.seed = 9;
  set_thread_count(1);
  const MstResult a = run_mst(content, {style}, opt);
  const MstResult b = run_mst(content, {style}, opt);
  set_thread_count(8);
  const MstResult c = run_mst(content, {style}, opt);
  set_thread_count(1);
  CHECK(a.output == b.output);
  CHECK(a.output == c.output);
  CHECK(a.labels == c.labels);
  CHECK(a.energy == c.energy);
}

TEST_CASE("file-level run writes outputs and a report") {
  test::ScratchDir dir("pipeline");
  std::mt19937_64 rng(56);
  write_tensor(test::random_map(rng, 4, 5, 5), dir / "c.npy");
  write_tensor(blob_style(rng, 4, 6, 6, 2), dir / "s.npy");
  PipelineConfig cfg;
  cfg.content = dir / "c.npy";
  cfg.styles = {dir / "s.npy"};
  cfg.output = dir / "o.npy";
  cfg.save_labels = dir / "l.npy";
  cfg.save_clusters = dir / "k.json";
  cfg.options.k = 2;
  const auto [result, report] = run_mst(cfg);
  CHECK(read_tensor(dir / "o.npy") == result.output);
  CHECK(read_labels_npy(dir / "l.npy") == result.labels);
  CHECK(read_cluster_json(dir / "k.json").labels == result.clusters.labels);
  for (const char* key : {"output", "k", "energy", "cluster_sizes", "matched_sizes", "timing", "metrics", "simd", "threads"}) {
    CHECK(report.contains(key));
  }
  CHECK(report["energy"].get<double>() == result.energy);
  CHECK(report["metrics"]["content_loss"].get<double>() >= 0.0);

  cfg.save_labels = dir / "l.png";
  run_mst(cfg);
  CHECK(std::filesystem::file_size(dir / "l.png") > 8);

  cfg.content = dir / "missing.npy";
  CHECK_THROWS_AS(run_mst(cfg), IoError);
}

TEST_CASE("style equal to content with K = 1 returns the content") {
  std::mt19937_64 rng(57);
  const FeatureMap content = test::random_map(rng, 8, 10, 10);
  MstOptions opt;
  opt.k = 1;
  const MstResult r = run_mst(content, {content}, opt);
  CHECK((to_eigen(as_matrix(r.output)) - to_eigen(as_matrix(content))).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("a single style file in multi-style form is the single-style run") {
  std::mt19937_64 rng(58);
  const FeatureMap content = test::random_map(rng, 4, 6, 6);
  const FeatureMap style = blob_style(rng, 4, 5, 5, 2);
  MstOptions opt;
  opt.k = 2;
  const FeatureMap restacked = from_matrix(stack_styles({style}), 5, 5);
  CHECK(restacked == style);
  CHECK(run_mst(content, {style}, opt).output == run_mst(content, {restacked}, opt).output);
}
