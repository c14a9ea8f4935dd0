#include <doctest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mst/cli.hpp"
#include "mst/clustering.hpp"
#include "mst/label_io.hpp"
#include "support.hpp"

using namespace mst;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mst");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Fixture {
  test::ScratchDir dir{"cli"};
  std::string content, style, style8;

  Fixture() {
    std::mt19937_64 rng(61);
    content = (dir / "content.npy").string();
    style = (dir / "style.npy").string();
    style8 = (dir / "style8.npy").string();
    write_tensor(test::random_map(rng, 4, 6, 6), content);
    write_tensor(test::random_map(rng, 4, 5, 5), style);
    write_tensor(test::random_map(rng, 8, 5, 5), style8);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with 2") {
  Fixture f;
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"transfer", "--content", f.content, "--style", f.style, "--out", f.path("o.npy"), "--k", "0"}).code == cli::kUsage);
  CHECK(run({"transfer", "--content", f.content, "--style", f.style, "--out", f.path("o.npy"), "--lambda", "-1"}).code == cli::kUsage);
  CHECK(run({"transfer", "--content", f.content, "--style", f.style, "--out", f.path("o.npy"), "--metric", "l1"}).code == cli::kUsage);
  CHECK(run({"transfer", "--content", f.content, "--style", f.style, "--out", f.path("o.npy"), "--alpha", "0.5,0.5"}).code == cli::kUsage);
  CHECK(run({"transfer", "--content", f.content, "--bogus"}).code == cli::kUsage);
  const Run missing = run({"transfer", "--content", f.content});
  CHECK(missing.code == cli::kUsage);
  CHECK(missing.err.find("--style") != std::string::npos);
  CHECK(run({"transfer", "--help"}).code == cli::kOk);
}

TEST_CASE("data problems map to distinct exit codes") {
  Fixture f;
  const std::string out = f.path("o.npy");
  CHECK(run({"transfer", "--content", f.content, "--style", f.style8, "--out", out}).code == cli::kChannelMismatch);
  CHECK(run({"transfer", "--content", f.content, "--style", f.style, "--out", out, "--k", "26"}).code == cli::kTooFewPoints);
  CHECK(run({"transfer", "--content", f.path("nope.npy"), "--style", f.style, "--out", out}).code == cli::kIoError);
  const std::string nonfinite = (test::data_dir() / "nonfinite_1x1x2.npy").string();
  CHECK(run({"transfer", "--content", nonfinite, "--style", f.style, "--out", out}).code == cli::kDataError);
  const std::string f64 = (test::data_dir() / "float64_2x1x1.npy").string();
  CHECK(run({"transfer", "--content", f64, "--style", f.style, "--out", out}).code == cli::kDataError);
}

TEST_CASE("transfer then energy reproduces the reported energy") {
  Fixture f;
  const Run t = run({"transfer", "--content", f.content, "--style", f.style + "," + f.style, "--out", f.path("o.npy"),
                     "--k", "3", "--lambda", "0.2", "--save-labels", f.path("l.npy"), "--save-clusters", f.path("k.json")});
  REQUIRE(t.code == cli::kOk);
  const json report = json::parse(t.out);
  CHECK(report["k"] == 3);
  CHECK(read_tensor(f.path("o.npy")).channels() == 4);
  const Run e = run({"energy", "--content", f.content, "--labels", f.path("l.npy"), "--clusters", f.path("k.json"),
                     "--lambda", "0.2"});
  REQUIRE(e.code == cli::kOk);
  CHECK(json::parse(e.out)["energy"].get<double>() == report["energy"].get<double>());
}

TEST_CASE("config files are read and flags override them") {
  Fixture f;
  {
    std::ofstream cfg(f.path("cfg.json"));
    cfg << json{{"version", 1}, {"content", f.content}, {"style", {f.style}}, {"output", f.path("o.npy")}, {"k", 2}}.dump();
  }
  const Run a = run({"transfer", "--config", f.path("cfg.json")});
  REQUIRE(a.code == cli::kOk);
  CHECK(json::parse(a.out)["k"] == 2);
  const Run b = run({"transfer", "--config", f.path("cfg.json"), "--k", "4"});
  REQUIRE(b.code == cli::kOk);
  CHECK(json::parse(b.out)["k"] == 4);
  {
    std::ofstream cfg(f.path("v2.json"));
    cfg << json{{"version", 2}, {"k", 2}}.dump();
  }
  CHECK(run({"transfer", "--config", f.path("v2.json")}).code == cli::kUsage);
  {
    std::ofstream cfg(f.path("broken.json"));
    cfg << "{ not json";
  }
  CHECK(run({"transfer", "--config", f.path("broken.json")}).code == cli::kUsage);
  CHECK(run({"transfer", "--config", f.path("absent.json")}).code == cli::kIoError);
}

TEST_CASE("cluster and match subcommands") {
  Fixture f;
  const Run c = run({"cluster", "--style", f.style, "--k", "3", "--out", f.path("k.json")});
  REQUIRE(c.code == cli::kOk);
  const ClusterModel m = read_cluster_json(f.path("k.json"));
  CHECK(m.k == 3);
  CHECK(m.labels.size() == 25);
  const Run inline_run = run({"cluster", "--style", f.style, "--k", "3"});
  CHECK(json::parse(inline_run.out)["labels"].get<std::vector<int>>().size() == 25);

  const Run mt = run({"match", "--content", f.content, "--clusters", f.path("k.json"), "--lambda", "0",
                      "--save-labels", f.path("l.npy")});
  REQUIRE(mt.code == cli::kOk);
  const json j = json::parse(mt.out);
  std::size_t total = 0;
  for (auto n : j["matched_sizes"].get<std::vector<std::size_t>>()) total += n;
  CHECK(total == 36);
  CHECK(read_labels_npy(f.path("l.npy")).size() == 36);
  const Run mm = run({"match", "--content", f.content, "--clusters", f.path("k.json"), "--k", "3"});
  CHECK(mm.code == cli::kOk);
  const Run bad = run({"match", "--content", f.style8, "--clusters", f.path("k.json")});
  CHECK(bad.code == cli::kChannelMismatch);
}

TEST_CASE("metrics subcommand") {
  Fixture f;
  write_tensor(FeatureMap(1, 1, 3, {1, 2, 3}), f.path("a.npy"));
  write_tensor(FeatureMap(1, 1, 3, {4, 2, -1}), f.path("b.npy"));
  const Run r = run({"metrics", "--output", "conv4_1=" + f.path("a.npy"), "--content-ref", "conv4_1=" + f.path("b.npy"),
                     "--style-ref", "conv4_1=" + f.path("a.npy")});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["content_loss"].get<double>() == doctest::Approx(5.0));
  CHECK(j["style_loss"].get<double>() == 0.0);
  CHECK(j["total"].get<double>() == doctest::Approx(5.0));
  CHECK(run({"metrics", "--output", "conv9_1=" + f.path("a.npy"), "--content-ref", "conv4_1=" + f.path("b.npy")}).code ==
        cli::kUsage);
  CHECK(run({"metrics", "--output", f.path("a.npy"), "--content-ref", "conv4_1=" + f.path("b.npy")}).code == cli::kUsage);
}

TEST_CASE("match labels fed to energy reproduce the match energy exactly") {
  Fixture f;
  for (const char* lambda : {"0", "0.1", "0.7"}) {
    const Run m = run({"match", "--content", f.content, "--style", f.style, "--k", "3", "--lambda", lambda,
                       "--save-labels", f.path("l.npy"), "--save-clusters", f.path("k.json")});
    REQUIRE(m.code == cli::kOk);
    const Run e = run({"energy", "--content", f.content, "--labels", f.path("l.npy"), "--clusters", f.path("k.json"),
                       "--lambda", lambda});
    REQUIRE(e.code == cli::kOk);
    CHECK(json::parse(e.out)["energy"].get<double>() == json::parse(m.out)["energy"].get<double>());
    const Run refit = run({"energy", "--content", f.content, "--labels", f.path("l.npy"), "--style", f.style, "--k", "3",
                           "--lambda", lambda});
    CHECK(json::parse(refit.out)["energy"].get<double>() == json::parse(m.out)["energy"].get<double>());
  }
}

TEST_CASE("one style given as a list matches one style given as a flag") {
  Fixture f;
  {
    std::ofstream cfg(f.path("cfg.json"));
    cfg << json{{"content", f.content}, {"style", {f.style}}, {"output", f.path("a.npy")}}.dump();
  }
  REQUIRE(run({"transfer", "--config", f.path("cfg.json")}).code == cli::kOk);
  REQUIRE(run({"transfer", "--content", f.content, "--style", f.style, "--out", f.path("b.npy")}).code == cli::kOk);
  std::ifstream a(f.path("a.npy"), std::ios::binary), b(f.path("b.npy"), std::ios::binary);
  const std::string sa{std::istreambuf_iterator<char>(a), {}}, sb{std::istreambuf_iterator<char>(b), {}};
  CHECK(!sa.empty());
  CHECK(sa == sb);
}
