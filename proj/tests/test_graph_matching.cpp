#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "mst/errors.hpp"
#include "mst/graph_matching.hpp"
#include "mst/label_io.hpp"
#include "support.hpp"

using namespace mst;

namespace {

long double oracle_cosine(std::span<const float> a, std::span<const float> b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  return 1.0L - ab / (std::sqrt(aa) * std::sqrt(bb));
}

// Energy written straight from the definition: unary sum plus lambda for
// every unordered pair of grid-adjacent positions with different labels.
double literal_energy(const LabelField& f, const DataCost& d, double lambda) {
  long double e = 0.0L;
  for (std::size_t p = 0; p < f.size(); ++p) e += d(static_cast<std::size_t>(f[p]), p);
  for (std::size_t p = 0; p < f.size(); ++p) {
    for (std::size_t q = p + 1; q < f.size(); ++q) {
      const long dr = static_cast<long>(p / f.width()) - static_cast<long>(q / f.width());
      const long dc = static_cast<long>(p % f.width()) - static_cast<long>(q % f.width());
      if (std::abs(dr) + std::abs(dc) == 1 && f[p] != f[q]) e += lambda;
    }
  }
  return static_cast<double>(e);
}

// Lowest energy reachable by any single alpha-expansion from f.
double best_expansion_energy(const LabelField& f, std::int32_t alpha, const DataCost& d, const EnergyParams& params) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << f.size()); ++mask) {
    LabelField g = f;
    for (std::size_t p = 0; p < f.size(); ++p) {
      if ((mask >> p) & 1u) g[p] = alpha;
    }
    best = std::min(best, total_energy(g, d, params));
  }
  return best;
}

}  // namespace

TEST_CASE("cosine distance basics") {
  const float a[] = {1, 2, 3};
  CHECK(cosine_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));
  const float x[] = {1, 0}, y[] = {0, 1}, z[] = {-1, 0};
  CHECK(cosine_distance(x, y) == 1.0);
  CHECK(cosine_distance(x, z) == 2.0);
  const float zero[] = {0, 0};
  const auto before = degenerate_cosine_count();
  CHECK(cosine_distance(x, zero) == 1.0);
  CHECK(degenerate_cosine_count() == before + 1);
  const float three[] = {1, 2, 3};
  CHECK_THROWS_AS(cosine_distance(x, three), DimensionError);
}

TEST_CASE("cosine distance matches a high-precision oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial * 7 % 600);
    const auto a = test::normal_floats(rng, n);
    const auto b = test::normal_floats(rng, n);
    const double d = cosine_distance(a, b);
    CHECK(std::abs(d - static_cast<double>(oracle_cosine(a, b))) <= 1e-6);
    CHECK((d >= 0.0 && d <= 2.0));
  }
}

TEST_CASE("data cost: exact match, composition and naive loop") {
  std::mt19937_64 rng(3);
  const FeatureMatrix content = test::random_matrix(rng, 6, 20);
  Eigen::MatrixXd centers(6, 3);
  for (Eigen::Index r = 0; r < 6; ++r) {
    centers(r, 0) = content(static_cast<std::size_t>(r), 4);
    centers(r, 1) = std::normal_distribution<double>()(rng);
    centers(r, 2) = std::normal_distribution<double>()(rng);
  }
  const DataCost cos = build_data_cost(content, centers, {0.1, Metric::kCosine});
  const DataCost euc = build_data_cost(content, centers, {0.1, Metric::kEuclidean});
  CHECK(cos(0, 4) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(euc(0, 4) == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(cos.labels() == 3);
  REQUIRE(cos.positions() == 20);
  for (std::size_t p = 0; p < 20; ++p) {
    const auto x = content.column(p);
    for (std::size_t k = 0; k < 3; ++k) {
      long double dot = 0, xx = 0, cc = 0, sq = 0;
      for (std::size_t r = 0; r < 6; ++r) {
        const long double c = centers(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
        dot += x[r] * c;
        xx += static_cast<long double>(x[r]) * x[r];
        cc += c * c;
        sq += (x[r] - c) * (x[r] - c);
      }
      CHECK(cos(k, p) == doctest::Approx(static_cast<double>(1.0L - dot / (std::sqrt(xx) * std::sqrt(cc)))).epsilon(1e-9));
      CHECK(euc(k, p) == doctest::Approx(static_cast<double>(std::sqrt(sq))).epsilon(1e-9));
      CHECK((cos(k, p) >= 0.0 && cos(k, p) <= 2.0));
    }
  }
  // A single content point against two centers is cosine_distance per center.
  FeatureMatrix one(2, 1, {1.0f, 1.0f});
  Eigen::MatrixXd two(2, 2);
  two << 1, 0,
         0, 1;
  const DataCost small = build_data_cost(one, two, {});
  const float e0[] = {1, 0}, e1[] = {0, 1};
  CHECK(small(0, 0) == doctest::Approx(cosine_distance(one.column(0), e0)));
  CHECK(small(1, 0) == doctest::Approx(cosine_distance(one.column(0), e1)));
  CHECK_THROWS_AS(build_data_cost(test::random_matrix(rng, 5, 3), two, {}), DimensionError);
}

TEST_CASE("total energy") {
  DataCost d(2, 2, {0.3, 0.5, 0.7, 0.2});
  SUBCASE("uniform labeling has no smoothness term") {
    CHECK(total_energy(LabelField(1, 2, 0), d, {0.1}) == doctest::Approx(0.8));
  }
  SUBCASE("1x2 grid with differing labels adds one Potts penalty") {
    const LabelField f(1, 2, {0, 1});
    CHECK(total_energy(f, d, {0.1}) == doctest::Approx(0.3 + 0.2 + 0.1));
  }
  SUBCASE("random fields match the literal definition") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t h = 1 + trial % 5, w = 1 + (trial / 5) % 6, k = 1 + trial % 4;
      const DataCost costs = test::random_costs(rng, k, h * w);
      std::uniform_int_distribution<std::int32_t> lab(0, static_cast<std::int32_t>(k) - 1);
      LabelField f(h, w);
      for (std::size_t p = 0; p < f.size(); ++p) f[p] = lab(rng);
      const double lambda = 0.37;
      CHECK(total_energy(f, costs, {lambda}) == doctest::Approx(literal_energy(f, costs, lambda)).epsilon(1e-12));
    }
  }
}

TEST_CASE("lambda = 0 reduces to the per-position argmin with low-label ties") {
  DataCost d(3, 4, {0.5, 0.1, 0.9, 0.4,
                    0.5, 0.2, 0.3, 0.4,
                    0.6, 0.0, 0.3, 0.1});
  const LabelField f = solve_labeling(d, 2, 2, {0.0});
  CHECK(f.labels() == std::vector<std::int32_t>{0, 2, 1, 2});
  CHECK(f == argmin_labeling(d, 2, 2));
}

TEST_CASE("K = 1 is all zeros") {
  std::mt19937_64 rng(1);
  const LabelField f = solve_labeling(test::random_costs(rng, 1, 12), 3, 4, {0.5});
  CHECK(f == LabelField(3, 4, 0));
}

TEST_CASE("huge lambda gives the best uniform labeling") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 2 + trial % 3;
    const DataCost d = test::random_costs(rng, k, 16);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t p = 0; p < 16; ++p) total += d(j, p);
    const EnergyParams params{total + 1.0};
    std::int32_t best = 0;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double e = total_energy(LabelField(4, 4, static_cast<std::int32_t>(j)), d, params);
      if (e < best_e) {
        best_e = e;
        best = static_cast<std::int32_t>(j);
      }
    }
    CHECK(solve_labeling(d, 4, 4, params) == LabelField(4, 4, best));
  }
}

TEST_CASE("K = 2 is exact on 3x3 grids") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const DataCost d = test::random_costs(rng, 2, 9);
    for (double lambda : {0.0, 0.1, 0.5}) {
      const EnergyParams params{lambda};
      const double exact = total_energy(brute_force_labeling(d, 3, 3, params), d, params);
      for (auto algo : {MaxFlowAlgorithm::kBoykovKolmogorov, MaxFlowAlgorithm::kEdmondsKarp}) {
        const LabelField f = solve_labeling(d, 3, 3, params, std::nullopt, {algo, {}});
        CHECK(total_energy(f, d, params) == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("K = 3 expansion: within 2x of optimum, never above init, and expansion-optimal") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 60; ++trial) {
    const DataCost d = test::random_costs(rng, 3, 9);
    const EnergyParams params{trial % 2 == 0 ? 0.1 : 0.6};
    const double opt = total_energy(brute_force_labeling(d, 3, 3, params), d, params);
    const LabelField init = argmin_labeling(d, 3, 3);
    SolveStats stats;
    const LabelField f = solve_labeling(d, 3, 3, params, std::nullopt, {}, &stats);
    const double e = total_energy(f, d, params);
    CHECK(e <= 2.0 * opt + 1e-12);
    CHECK(e <= total_energy(init, d, params));
    CHECK(stats.sweeps >= 1);
    // No single expansion move can improve the result.
    for (std::int32_t alpha = 0; alpha < 3; ++alpha) {
      CHECK(best_expansion_energy(f, alpha, d, params) >= e - 1e-12);
    }
  }
}

TEST_CASE("explicit initialization is respected") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::int32_t> lab(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const DataCost d = test::random_costs(rng, 4, 12);
    LabelField init(3, 4);
    for (std::size_t p = 0; p < 12; ++p) init[p] = lab(rng);
    for (double lambda : {0.0, 0.2}) {
      const EnergyParams params{lambda};
      const LabelField f = solve_labeling(d, 3, 4, params, init);
      CHECK(total_energy(f, d, params) <= total_energy(init, d, params));
    }
  }
  LabelField bad(3, 4, 7);
  CHECK_THROWS_AS(solve_labeling(test::random_costs(rng, 4, 12), 3, 4, {0.1}, bad), ArgumentError);
}

TEST_CASE("label visiting order changes nothing beyond the 2x bound") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const DataCost d = test::random_costs(rng, 3, 9);
    const EnergyParams params{0.3};
    const double opt = total_energy(brute_force_labeling(d, 3, 3, params), d, params);
    const LabelField fwd = solve_labeling(d, 3, 3, params, std::nullopt, {{}, {0, 1, 2}});
    const LabelField rev = solve_labeling(d, 3, 3, params, std::nullopt, {{}, {2, 1, 0}});
    CHECK(total_energy(fwd, d, params) <= 2.0 * opt + 1e-12);
    CHECK(total_energy(rev, d, params) <= 2.0 * opt + 1e-12);
  }
}

TEST_CASE("larger lambda never adds discordant pairs at the optimum") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t k = 2 + trial % 2;
    const DataCost d = test::random_costs(rng, k, 9);
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double lambda : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
      const std::size_t now = discordant_pairs(brute_force_labeling(d, 3, 3, {lambda}));
      CHECK(now <= previous);
      previous = now;
    }
  }
}

TEST_CASE("brute force oracle") {
  std::mt19937_64 rng(24);
  const DataCost one = test::random_costs(rng, 4, 1);
  const LabelField f = brute_force_labeling(one, 1, 1, {0.1});
  CHECK(f == argmin_labeling(one, 1, 1));
  CHECK_THROWS_AS(brute_force_labeling(test::random_costs(rng, 4, 25), 5, 5, {0.1}), InstanceTooLargeError);
}

TEST_CASE("gather_groups") {
  SUBCASE("uniform labels give a single group") {
    const auto g = gather_groups(LabelField(2, 3, 1));
    REQUIRE(g.size() == 1);
    CHECK(g[0].label == 1);
    CHECK(g[0].positions == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("alternating labels") {
    const auto g = gather_groups(LabelField(1, 4, {0, 1, 0, 1}));
    REQUIRE(g.size() == 2);
    CHECK(g[0].positions == std::vector<std::size_t>{0, 2});
    CHECK(g[1].positions == std::vector<std::size_t>{1, 3});
  }
  SUBCASE("property: groups partition the grid") {
    std::mt19937_64 rng(25);
    std::uniform_int_distribution<std::int32_t> lab(0, 5);
    for (int trial = 0; trial < 50; ++trial) {
      LabelField f(4, 7);
      for (std::size_t p = 0; p < f.size(); ++p) f[p] = lab(rng);
      std::multiset<std::size_t> seen;
      for (const auto& g : gather_groups(f)) {
        CHECK(!g.positions.empty());
        CHECK(std::is_sorted(g.positions.begin(), g.positions.end()));
        for (auto p : g.positions) {
          CHECK(f[p] == g.label);
          seen.insert(p);
        }
      }
      CHECK(seen.size() == f.size());
      for (std::size_t p = 0; p < f.size(); ++p) CHECK(seen.count(p) == 1);
    }
  }
}

TEST_CASE("label field export") {
  test::ScratchDir dir("labels");
  const LabelField f(2, 3, {0, 1, 2, 2, 1, 0});
  write_labels_npy(f, dir / "l.npy");
  CHECK(read_labels_npy(dir / "l.npy") == f);
  CHECK(read_labels_npy(test::data_dir() / "labels_i8_2x3.npy") == f);
  write_labels_png(f, dir / "l.png");
  std::ifstream in(dir / "l.png", std::ios::binary);
  char sig[8];
  in.read(sig, 8);
  CHECK(std::string(sig + 1, 3) == "PNG");
  CHECK_THROWS_AS(write_labels_png(LabelField(1, 1, 300), dir / "bad.png"), ArgumentError);
}
