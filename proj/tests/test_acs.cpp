#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <vector>

#include "seizdet/acs.hpp"
#include "seizdet/common.hpp"
#include "seizdet/dataset.hpp"

using namespace seizdet;
using namespace seizdet::acs;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("seizdet_test_acs_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

dataset::SynthConfig planted_config(int n_channels, std::vector<int> planted,
                                    std::uint64_t seed) {
  dataset::SynthConfig c;
  c.subject_id = "acs";
  c.n_channels = n_channels;
  c.fs = 128.0;
  c.n_seizures = 2;
  c.seizure_len_s = 20;
  c.interictal_len_s = 60;
  c.planted_channels = std::move(planted);
  c.seizure_band_lo_hz = 5.0;
  c.seizure_band_hi_hz = 12.0;
  c.shared_component_gain = 0.5;
  c.noise_gain = 1.0;
  c.rng_seed = seed;
  return c;
}

dataset::Dataset make_planted(const dataset::SynthConfig& c,
                              const std::string& tag) {
  return dataset::generate_synthetic(c, fresh_dir(tag));
}

std::vector<std::size_t> all_indices(const dataset::Dataset& ds) {
  std::vector<std::size_t> idx(ds.epochs.size());
  std::iota(idx.begin(), idx.end(), 0u);
  return idx;
}

}  // namespace

TEST_CASE("acs_matrix shape and content") {
  dataset::Epoch e;
  e.fs = 128.0;
  e.samples = Matrix(16, 128);
  Rng rng(3);
  for (auto& v : e.samples.data()) v = rng.normal();

  Matrix m = acs_matrix(e);
  CHECK(m.rows() == 16);
  CHECK(m.cols() == 30);

  // label metadata must not influence the representation
  dataset::Epoch labeled = e;
  labeled.label = dataset::Label::ictal;
  labeled.latency_s = 0;
  labeled.seizure_id = "x";
  Matrix m2 = acs_matrix(labeled);
  CHECK(m.data() == m2.data());

  // silent channels bottom out at the log floor
  dataset::Epoch quiet;
  quiet.fs = 128.0;
  quiet.samples = Matrix(2, 128);
  for (auto& v : quiet.samples.data()) v = 0.0;
  Matrix q = acs_matrix(quiet);
  for (double v : q.data()) CHECK(v == -12.0);

  CHECK_THROWS_AS(acs_matrix(e, 0, 30), UsageError);
  CHECK_THROWS_AS(acs_matrix(e, 10, 10), UsageError);
}

TEST_CASE("planted channels rise to the top of the ranking") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ds = make_planted(planted_config(16, {2, 5}, 500 + seed),
                           "plant" + std::to_string(seed));
    AcsConfig cfg;
    cfg.rng_seed = seed;
    auto ranking = rank_channels(ds, all_indices(ds), cfg);
    REQUIRE(ranking.order.size() == 16);
    std::set<int> top{ranking.order[0], ranking.order[1]};
    hits += top == std::set<int>{2, 5};
  }
  CHECK(hits >= 9);
}

TEST_CASE("ranking fields are mutually consistent") {
  auto ds = make_planted(planted_config(8, {1, 6}, 42), "consist");
  AcsConfig cfg;
  cfg.rng_seed = 7;
  auto r = rank_channels(ds, all_indices(ds), cfg);

  REQUIRE(r.importance.size() == 8);
  REQUIRE(r.order.size() == 8);
  std::vector<int> sorted = r.order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 8; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);

  for (std::size_t i = 1; i < r.order.size(); ++i) {
    const double a = r.importance[static_cast<std::size_t>(r.order[i - 1])];
    const double b = r.importance[static_cast<std::size_t>(r.order[i])];
    CHECK(a >= b);
    if (a == b) CHECK(r.order[i - 1] < r.order[i]);
  }
  for (double v : r.importance) CHECK(v >= 0.0);
  double sum = std::accumulate(r.importance.begin(), r.importance.end(), 0.0);
  CHECK(sum > 0.0);
  REQUIRE(r.provenance.size() == 1);
  CHECK(r.provenance[0].find("random_forest") != std::string::npos);

  // same data, same seed, same ranking
  auto r2 = rank_channels(ds, all_indices(ds), cfg);
  CHECK(r2.importance == r.importance);
  CHECK(r2.order == r.order);
}

TEST_CASE("duplicating every epoch keeps the leading channel") {
  int stable = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ds = make_planted(planted_config(8, {3}, 900 + seed),
                           "dup" + std::to_string(seed));
    AcsConfig cfg;
    cfg.rng_seed = seed;
    auto base = rank_channels(ds, all_indices(ds), cfg);

    dataset::Dataset doubled = ds;
    for (const auto& e : ds.epochs) doubled.epochs.push_back(e);
    auto idx2 = all_indices(doubled);
    auto dup = rank_channels(doubled, idx2, cfg);
    stable += dup.order[0] == base.order[0];
  }
  CHECK(stable >= 9);
}

TEST_CASE("uniform amplitude scaling does not reorder channels") {
  auto ds = make_planted(planted_config(8, {2, 7}, 77), "scale");
  AcsConfig cfg;
  cfg.rng_seed = 13;
  auto base = rank_channels(ds, all_indices(ds), cfg);

  dataset::Dataset scaled = ds;
  for (auto& e : scaled.epochs)
    for (auto& v : e.samples.data()) v *= 10.0;
  auto r = rank_channels(scaled, all_indices(scaled), cfg);
  CHECK(r.order == base.order);
}

TEST_CASE("single-channel datasets rank trivially") {
  auto ds = make_planted(planted_config(1, {0}, 21), "single");
  AcsConfig cfg;
  cfg.rng_seed = 2;
  auto r = rank_channels(ds, all_indices(ds), cfg);
  CHECK(r.order == std::vector<int>{0});
  CHECK(select_top(r, 1) == std::vector<int>{0});
}

TEST_CASE("rank_channels input validation") {
  auto ds = make_planted(planted_config(4, {1}, 9), "valid");
  AcsConfig cfg;

  SUBCASE("empty index pool") {
    std::vector<std::size_t> none;
    CHECK_THROWS_AS(rank_channels(ds, none, cfg), DataError);
  }
  SUBCASE("single-class pool") {
    auto inter = ds.interictal_indices();
    CHECK_THROWS_AS(rank_channels(ds, inter, cfg), DataError);
  }
  SUBCASE("no providers") {
    AcsConfig empty;
    empty.providers.clear();
    CHECK_THROWS_AS(rank_channels(ds, all_indices(ds), empty), UsageError);
  }
  SUBCASE("unknown provider kind") {
    AcsConfig weird;
    weird.providers[0].kind = "gradient_boosting";
    CHECK_THROWS_AS(rank_channels(ds, all_indices(ds), weird), UsageError);
  }
}

TEST_CASE("select_top slices the order") {
  ChannelRanking r;
  r.importance = {0.1, 0.4, 0.2, 0.3};
  r.order = {1, 3, 2, 0};
  CHECK(select_top(r, 1) == std::vector<int>{1});
  CHECK(select_top(r, 3) == std::vector<int>{1, 3, 2});
  CHECK(select_top(r, 4) == std::vector<int>{1, 3, 2, 0});
  CHECK_THROWS_AS(select_top(r, 0), UsageError);
  CHECK_THROWS_AS(select_top(r, 5), UsageError);
}

TEST_CASE("pick_m_from_sweep takes the smallest near-best m") {
  std::vector<MSweepPoint> sweep{{1, 0.80}, {4, 0.955}, {8, 0.96}, {16, 0.958}};
  CHECK(pick_m_from_sweep(sweep) == 4);

  // order of the input must not matter
  std::vector<MSweepPoint> shuffled{{16, 0.958}, {1, 0.80}, {8, 0.96}, {4, 0.955}};
  CHECK(pick_m_from_sweep(shuffled) == 4);

  // a flat sweep picks the smallest m
  std::vector<MSweepPoint> flat{{1, 0.9}, {2, 0.9}, {8, 0.9}};
  CHECK(pick_m_from_sweep(flat) == 1);

  // exactly at the 0.01 boundary still counts as near-best
  std::vector<MSweepPoint> edge{{1, 0.95}, {2, 0.96}};
  CHECK(pick_m_from_sweep(edge) == 1);

  CHECK_THROWS_AS(pick_m_from_sweep({}), UsageError);
}

TEST_CASE("default_m_grid interleaves powers of two with midpoints") {
  CHECK(default_m_grid(32) == std::vector<int>{1, 2, 4, 8, 12, 16, 24, 32});
  CHECK(default_m_grid(64) == std::vector<int>{1, 2, 4, 8, 12, 16, 24, 32, 48, 64});
  CHECK(default_m_grid(100) ==
        std::vector<int>{1, 2, 4, 8, 12, 16, 24, 32, 48, 64, 96, 100});
  CHECK(default_m_grid(5) == std::vector<int>{1, 2, 4, 5});
  CHECK(default_m_grid(1) == std::vector<int>{1});
  CHECK_THROWS_AS(default_m_grid(0), UsageError);
}

TEST_CASE("optimize_m lands at or below the planted channel count") {
  // four informative channels of 32: a handful of channels should be enough
  int small_enough = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    dataset::SynthConfig c = planted_config(32, {3, 11, 19, 27}, 7000 + seed);
    c.n_seizures = 2;
    c.seizure_len_s = 20;
    c.interictal_len_s = 40;
    auto ds = make_planted(c, "opt" + std::to_string(seed));

    AcsConfig acfg;
    acfg.rng_seed = seed;
    auto ranking = rank_channels(ds, all_indices(ds), acfg);

    MOptimizeConfig mc;
    mc.n_trees = 100;
    mc.rng_seed = seed;
    auto res = optimize_m(ds, all_indices(ds), ranking, mc);
    REQUIRE(!res.sweep.empty());
    CHECK(res.sweep.size() == default_m_grid(32).size());
    for (const auto& pt : res.sweep) {
      CHECK(pt.auc >= 0.0);
      CHECK(pt.auc <= 1.0);
    }
    CHECK(res.m == pick_m_from_sweep(res.sweep));
    small_enough += res.m <= 8;
  }
  CHECK(small_enough >= 2);
}

TEST_CASE("stored rankings and channel lists round-trip") {
  auto dir = fresh_dir("store");
  StoredRanking sr;
  sr.subject_id = "subjX";
  sr.seed = 424242;
  sr.ranking.importance = {0.1, 0.6, 0.3};
  sr.ranking.order = {1, 2, 0};
  sr.ranking.provenance = {"random_forest(n_trees=300)"};
  save_ranking(dir / "r.json", sr);
  auto back = load_ranking(dir / "r.json");
  CHECK(back.subject_id == "subjX");
  CHECK(back.seed == 424242);
  CHECK(back.ranking.importance == sr.ranking.importance);
  CHECK(back.ranking.order == sr.ranking.order);
  CHECK(back.ranking.provenance == sr.ranking.provenance);

  StoredChannels sc;
  sc.subject_id = "subjX";
  sc.channels = {1, 2};
  sc.m_mode = "auto";
  sc.sweep = {{1, 0.9}, {2, 0.95}};
  save_channels(dir / "c.json", sc);
  auto cback = load_channels(dir / "c.json");
  CHECK(cback.subject_id == "subjX");
  CHECK(cback.channels == sc.channels);
  CHECK(cback.m_mode == "auto");
  REQUIRE(cback.sweep.size() == 2);
  CHECK(cback.sweep[1].m == 2);
  CHECK(cback.sweep[1].auc == 0.95);

  CHECK_THROWS_AS(load_ranking(dir / "missing.json"), DataError);
  CHECK_THROWS_AS(load_channels(dir / "missing.json"), DataError);

  // an order that is not a permutation must be rejected
  StoredRanking bad = sr;
  bad.ranking.order = {1, 1, 0};
  save_ranking(dir / "bad.json", bad);
  CHECK_THROWS_AS(load_ranking(dir / "bad.json"), DataError);
}
