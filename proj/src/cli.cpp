#include "mst/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mst/clustering.hpp"
#include "mst/errors.hpp"
#include "mst/feature_io.hpp"
#include "mst/graph_matching.hpp"
#include "mst/label_io.hpp"
#include "mst/metrics.hpp"
#include "mst/parallel.hpp"
#include "mst/pipeline.hpp"

namespace mst::cli {
namespace {

using nlohmann::json;

constexpr int kConfigVersion = 1;

/// Usage problem detected after parsing (config values, missing inputs).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string content;
  std::vector<std::string> styles;
  std::string output;
  std::string save_labels;
  std::string save_clusters;
  std::string clusters_in;
  std::string labels_in;
  std::size_t k = 3;
  double lambda = 0.1;
  std::string metric = "cosine";
  std::string mode = "wct";
  std::vector<double> alpha{1.0};
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  std::size_t threads = 1;
  double eig_floor = 1e-8;
  double gamma = kDefaultStyleWeight;
  std::vector<std::string> bundle_output;
  std::vector<std::string> bundle_content;
  std::vector<std::string> bundle_style;
};

// Flag values land in private holders and are copied over the config only
// when the flag was actually given, so flags win over --config.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* bind(const std::string& name, T& target, const std::string& help) {
    auto holder = std::make_shared<T>(target);
    CLI::Option* opt = app_->add_option(name, *holder, help);
    commits_.push_back([opt, holder, &target] {
      if (opt->count() > 0) target = *holder;
    });
    return opt;
  }

  void commit() const {
    for (const auto& c : commits_) c();
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void()>> commits_;
};

void apply_config(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  try {
    if (j.contains("version") && j["version"].get<int>() != kConfigVersion) {
      throw UsageError("config " + path + ": unsupported version " + j["version"].dump());
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("content", s.content);
    if (j.contains("style")) {
      s.styles = j["style"].is_array() ? j["style"].get<std::vector<std::string>>()
                                       : std::vector<std::string>{j["style"].get<std::string>()};
    }
    get("output", s.output);
    get("save_labels", s.save_labels);
    get("save_clusters", s.save_clusters);
    get("clusters", s.clusters_in);
    get("labels", s.labels_in);
    if (j.contains("k")) {
      const auto k = j["k"].get<long long>();
      if (k < 1) throw UsageError("config: k must be >= 1");
      s.k = static_cast<std::size_t>(k);
    }
    get("lambda", s.lambda);
    get("metric", s.metric);
    get("mode", s.mode);
    if (j.contains("alpha")) {
      s.alpha = j["alpha"].is_array() ? j["alpha"].get<std::vector<double>>()
                                      : std::vector<double>{j["alpha"].get<double>()};
    }
    get("seed", s.seed);
    get("max_iters", s.max_iters);
    get("threads", s.threads);
    get("eig_floor", s.eig_floor);
    get("gamma", s.gamma);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

void check_common(const Settings& s) {
  require(s.k >= 1, "--k must be >= 1");
  require(std::isfinite(s.lambda) && s.lambda >= 0.0, "--lambda must be finite and >= 0");
  require(s.threads >= 1, "--threads must be >= 1");
  require(s.max_iters >= 1, "--max-iters must be >= 1");
  try {
    parse_metric(s.metric);
    parse_transform_mode(s.mode);
    TransformParams{TransformMode::kWct, s.alpha, s.eig_floor}.validate(s.k);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

MstOptions to_options(const Settings& s) {
  MstOptions o;
  o.k = s.k;
  o.seed = s.seed;
  o.max_iters = s.max_iters;
  o.energy = {s.lambda, parse_metric(s.metric)};
  o.transform = {parse_transform_mode(s.mode), s.alpha, s.eig_floor};
  return o;
}

std::vector<FeatureMap> load_styles(const Settings& s) {
  std::vector<FeatureMap> styles;
  for (const auto& p : s.styles) styles.push_back(read_tensor(p));
  return styles;
}

ClusterModel clusters_for(const Settings& s, const FeatureMap& content) {
  if (!s.clusters_in.empty()) {
    ClusterModel m = read_cluster_json(s.clusters_in);
    if (static_cast<std::size_t>(m.centers.rows()) != content.channels()) {
      throw ChannelMismatchError("cluster centers have " + std::to_string(m.centers.rows()) +
                                 " channels, content has " + std::to_string(content.channels()));
    }
    return m;
  }
  const auto styles = load_styles(s);
  for (const auto& st : styles) {
    if (st.channels() != content.channels()) throw ChannelMismatchError("content and style channel counts differ");
  }
  return kmeans_fit(stack_styles(styles), {s.k, s.seed, s.max_iters});
}

FeatureBundle load_bundle(const std::vector<std::string>& specs, const char* flag) {
  FeatureBundle b;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError(std::string(flag) + " expects layer=path, got '" + spec + "'");
    const std::string layer = spec.substr(0, eq);
    if (!FeatureBundle::is_known_layer(layer)) throw UsageError("unknown layer '" + layer + "'");
    b.add(layer, read_tensor(spec.substr(eq + 1)));
  }
  return b;
}

int run_transfer(const Settings& s, std::ostream& out) {
  require(!s.content.empty(), "transfer: --content is required");
  require(!s.styles.empty(), "transfer: --style is required");
  require(!s.output.empty(), "transfer: --out is required");
  PipelineConfig cfg;
  cfg.content = s.content;
  cfg.styles.assign(s.styles.begin(), s.styles.end());
  cfg.output = s.output;
  if (!s.save_labels.empty()) cfg.save_labels = s.save_labels;
  if (!s.save_clusters.empty()) cfg.save_clusters = s.save_clusters;
  cfg.options = to_options(s);
  cfg.threads = s.threads;
  auto [result, report] = run_mst(cfg);
  out << report.dump(2) << '\n';
  return kOk;
}

int run_cluster(const Settings& s, std::ostream& out) {
  require(!s.styles.empty(), "cluster: --style is required");
  const ClusterModel m = kmeans_fit(stack_styles(load_styles(s)), {s.k, s.seed, s.max_iters});
  if (!s.output.empty()) write_cluster_json(m, s.output);
  json j;
  j["k"] = m.k;
  j["counts"] = m.counts;
  j["iterations"] = m.iterations;
  j["converged"] = m.converged;
  j["objective"] = m.objective.empty() ? 0.0 : m.objective.back();
  if (s.output.empty()) {
    std::vector<std::vector<double>> centers;
    for (Eigen::Index c = 0; c < m.centers.cols(); ++c) {
      centers.emplace_back(m.centers.col(c).data(), m.centers.col(c).data() + m.centers.rows());
    }
    j["centers"] = centers;
    j["labels"] = m.labels;
  }
  out << j.dump(2) << '\n';
  return kOk;
}

int run_match(const Settings& s, std::ostream& out) {
  require(!s.content.empty(), "match: --content is required");
  require(!s.styles.empty() || !s.clusters_in.empty(), "match: --style or --clusters is required");
  const FeatureMap content = read_tensor(s.content);
  const ClusterModel m = clusters_for(s, content);
  const EnergyParams params{s.lambda, parse_metric(s.metric)};
  const DataCost costs = build_data_cost(as_matrix(content), m.centers, params);
  const LabelField labels = solve_labeling(costs, content.height(), content.width(), params);
  const double energy = total_energy(labels, costs, params);
  if (!s.save_labels.empty()) {
    if (std::filesystem::path(s.save_labels).extension() == ".png") {
      write_labels_png(labels, s.save_labels);
    } else {
      write_labels_npy(labels, s.save_labels);
    }
  }
  if (!s.save_clusters.empty()) write_cluster_json(m, s.save_clusters);
  std::vector<std::size_t> sizes(m.k, 0);
  for (auto l : labels.labels()) ++sizes[static_cast<std::size_t>(l)];
  json j;
  j["energy"] = energy;
  j["matched_sizes"] = sizes;
  j["discordant_pairs"] = discordant_pairs(labels);
  out << j.dump(2) << '\n';
  return kOk;
}

int run_energy(const Settings& s, std::ostream& out) {
  require(!s.content.empty(), "energy: --content is required");
  require(!s.labels_in.empty(), "energy: --labels is required");
  require(!s.styles.empty() || !s.clusters_in.empty(), "energy: --style or --clusters is required");
  const FeatureMap content = read_tensor(s.content);
  const ClusterModel m = clusters_for(s, content);
  const LabelField labels = read_labels_npy(s.labels_in);
  if (labels.height() != content.height() || labels.width() != content.width()) {
    throw DataError("label grid does not match the content feature grid");
  }
  for (auto l : labels.labels()) {
    if (static_cast<std::size_t>(l) >= m.k) throw DataError("label " + std::to_string(l) + " exceeds K");
  }
  const EnergyParams params{s.lambda, parse_metric(s.metric)};
  const DataCost costs = build_data_cost(as_matrix(content), m.centers, params);
  json j;
  j["energy"] = total_energy(labels, costs, params);
  j["discordant_pairs"] = discordant_pairs(labels);
  out << j.dump(2) << '\n';
  return kOk;
}

int run_metrics(const Settings& s, std::ostream& out) {
  require(!s.bundle_output.empty(), "metrics: --output is required");
  const FeatureBundle a = load_bundle(s.bundle_output, "--output");
  json j;
  double total = 0.0;
  if (!s.bundle_content.empty()) {
    const double lc = content_loss(a, load_bundle(s.bundle_content, "--content-ref"));
    j["content_loss"] = lc;
    total += lc;
  }
  if (!s.bundle_style.empty()) {
    const double ls = style_loss(a, load_bundle(s.bundle_style, "--style-ref"));
    j["style_loss"] = ls;
    total += s.gamma * ls;
  }
  require(!j.empty(), "metrics: give --content-ref and/or --style-ref");
  j["total"] = total;
  out << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimodal style transfer on deep feature tensors", "mst"};
  app.require_subcommand(1);
  Settings s;
  std::string config_path;

  auto* transfer = app.add_subcommand("transfer", "cluster, match and transfer; writes the stylized feature tensor");
  auto* cluster = app.add_subcommand("cluster", "K-means over style features; emits centers and labels");
  auto* match = app.add_subcommand("match", "graph-cut matching of content positions to style clusters");
  auto* metrics = app.add_subcommand("metrics", "content/style losses between feature bundles");
  auto* energy = app.add_subcommand("energy", "labeling energy of a saved label field");

  std::vector<Binder> binders;
  binders.reserve(5);
  auto with_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "JSON config (flags win)"); };

  {
    Binder& b = binders.emplace_back(transfer);
    with_config(transfer);
    b.bind("--content", s.content, "content features (.npy)");
    b.bind("--style", s.styles, "style features (.npy), several for multi-style")->delimiter(',');
    b.bind("--out", s.output, "output feature tensor (.npy)");
    b.bind("--k", s.k, "number of style clusters")->check(CLI::PositiveNumber);
    b.bind("--lambda", s.lambda, "Potts smoothness weight")->check(CLI::NonNegativeNumber);
    b.bind("--metric", s.metric, "matching distance")->check(CLI::IsMember({"cosine", "euclidean"}));
    b.bind("--mode", s.mode, "per-cluster transform")->check(CLI::IsMember({"wct", "adain"}));
    b.bind("--alpha", s.alpha, "blend weight, scalar or one per cluster")->delimiter(',');
    b.bind("--seed", s.seed, "K-means++ seed");
    b.bind("--max-iters", s.max_iters, "K-means iteration cap")->check(CLI::PositiveNumber);
    b.bind("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber);
    b.bind("--save-labels", s.save_labels, "write the label field (.npy or .png)");
    b.bind("--save-clusters", s.save_clusters, "write the cluster model (.json)");
  }
  {
    Binder& b = binders.emplace_back(cluster);
    with_config(cluster);
    b.bind("--style", s.styles, "style features (.npy)")->delimiter(',');
    b.bind("--k", s.k, "number of clusters")->check(CLI::PositiveNumber);
    b.bind("--seed", s.seed, "K-means++ seed");
    b.bind("--max-iters", s.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    b.bind("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber);
    b.bind("--out", s.output, "cluster model (.json)");
  }
  {
    Binder& b = binders.emplace_back(match);
    with_config(match);
    b.bind("--content", s.content, "content features (.npy)");
    b.bind("--style", s.styles, "style features (.npy)")->delimiter(',');
    b.bind("--clusters", s.clusters_in, "use a saved cluster model instead of fitting");
    b.bind("--k", s.k, "number of clusters")->check(CLI::PositiveNumber);
    b.bind("--seed", s.seed, "K-means++ seed");
    b.bind("--max-iters", s.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    b.bind("--lambda", s.lambda, "Potts smoothness weight")->check(CLI::NonNegativeNumber);
    b.bind("--metric", s.metric, "matching distance")->check(CLI::IsMember({"cosine", "euclidean"}));
    b.bind("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber);
    b.bind("--save-labels", s.save_labels, "write the label field (.npy or .png)");
    b.bind("--save-clusters", s.save_clusters, "write the cluster model (.json)");
  }
  {
    Binder& b = binders.emplace_back(metrics);
    b.bind("--output", s.bundle_output, "stylized bundle, layer=path entries")->delimiter(',');
    b.bind("--content-ref", s.bundle_content, "content bundle, layer=path entries")->delimiter(',');
    b.bind("--style-ref", s.bundle_style, "style bundle, layer=path entries")->delimiter(',');
    b.bind("--gamma", s.gamma, "style loss weight")->check(CLI::NonNegativeNumber);
  }
  {
    Binder& b = binders.emplace_back(energy);
    with_config(energy);
    b.bind("--content", s.content, "content features (.npy)");
    b.bind("--labels", s.labels_in, "label field (.npy)");
    b.bind("--clusters", s.clusters_in, "cluster model (.json)");
    b.bind("--style", s.styles, "style features (.npy), refit instead of --clusters")->delimiter(',');
    b.bind("--k", s.k, "number of clusters when refitting")->check(CLI::PositiveNumber);
    b.bind("--seed", s.seed, "K-means++ seed when refitting");
    b.bind("--max-iters", s.max_iters, "iteration cap when refitting")->check(CLI::PositiveNumber);
    b.bind("--lambda", s.lambda, "Potts smoothness weight")->check(CLI::NonNegativeNumber);
    b.bind("--metric", s.metric, "matching distance")->check(CLI::IsMember({"cosine", "euclidean"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (!config_path.empty()) apply_config(config_path, s);
    for (const auto& b : binders) b.commit();
    check_common(s);
    set_thread_count(s.threads);
    if (transfer->parsed()) return run_transfer(s, out);
    if (cluster->parsed()) return run_cluster(s, out);
    if (match->parsed()) return run_match(s, out);
    if (metrics->parsed()) return run_metrics(s, out);
    if (energy->parsed()) return run_energy(s, out);
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const ChannelMismatchError& e) {
    err << "error: " << e.what() << '\n';
    return kChannelMismatch;
  } catch (const TooFewPointsError& e) {
    err << "error: " << e.what() << '\n';
    return kTooFewPoints;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace mst::cli
