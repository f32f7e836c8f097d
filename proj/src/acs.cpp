#include "seizdet/acs.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "seizdet/eval.hpp"
#include "seizdet/features.hpp"
#include "seizdet/forest.hpp"

namespace seizdet::acs {
namespace {

using nlohmann::json;

void check_bins(int lo, int hi) {
  if (lo < 1 || hi <= lo)
    throw UsageError("channel-selection bins must satisfy 1 <= lo < hi, got [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

json sweep_to_json(const std::vector<MSweepPoint>& sweep) {
  json arr = json::array();
  for (const MSweepPoint& p : sweep) arr.push_back({{"m", p.m}, {"auc", p.auc}});
  return arr;
}

std::vector<MSweepPoint> sweep_from_json(const json& arr) {
  std::vector<MSweepPoint> sweep;
  for (const json& p : arr)
    sweep.push_back({p.at("m").get<int>(), p.at("auc").get<double>()});
  return sweep;
}

}  // namespace

Matrix acs_matrix(const dataset::Epoch& epoch, int lo_hz, int hi_hz) {
  check_bins(lo_hz, hi_hz);
  std::size_t n = epoch.n_channels();
  Matrix out(n, static_cast<std::size_t>(hi_hz - lo_hz + 1));
  for (std::size_t c = 0; c < n; ++c) {
    features::Spectrum sp =
        features::log_power_bins(epoch.samples.row(c), epoch.fs, lo_hz, hi_hz);
    std::copy(sp.bins.begin(), sp.bins.end(), out.row(c).begin());
  }
  return out;
}

ChannelRanking rank_channels(const dataset::Dataset& ds,
                             std::span<const std::size_t> train_indices,
                             const AcsConfig& config, int threads) {
  if (config.providers.empty())
    throw UsageError("channel selection needs at least one provider");
  check_bins(config.bin_lo_hz, config.bin_hi_hz);
  if (train_indices.empty())
    throw DataError("rank_channels: empty training set");

  std::size_t n_channels = ds.epochs[train_indices[0]].n_channels();
  std::size_t n_bins = static_cast<std::size_t>(config.bin_hi_hz - config.bin_lo_hz + 1);

  Matrix x(train_indices.size(), n_channels * n_bins);
  std::vector<int> y(train_indices.size());
  bool any_pos = false, any_neg = false;
  for (std::size_t row = 0; row < train_indices.size(); ++row) {
    const dataset::Epoch& ep = ds.epochs[train_indices[row]];
    Matrix bins = acs_matrix(ep, config.bin_lo_hz, config.bin_hi_hz);
    std::copy(bins.data().begin(), bins.data().end(), x.row(row).begin());
    y[row] = dataset::class3_of(ep) == dataset::ClassLabel3::interictal ? 0 : 1;
    (y[row] ? any_pos : any_neg) = true;
  }
  if (!any_pos || !any_neg)
    throw DataError(
        "rank_channels needs both seizure and interictal training epochs");

  ChannelRanking ranking;
  ranking.importance.assign(n_channels, 0.0);
  for (std::size_t p = 0; p < config.providers.size(); ++p) {
    const ProviderConfig& prov = config.providers[p];
    if (prov.kind != "random_forest")
      throw UsageError("unknown channel-importance provider: " + prov.kind);
    forest::ForestParams fp;
    fp.n_trees = prov.n_trees;
    fp.class_mode = forest::ClassMode::binary;
    fp.rng_seed = derive_seed(config.rng_seed, "acs-provider-" + std::to_string(p));
    forest::ForestModel model = forest::train(x, y, fp, threads);
    std::vector<double> imp = forest::feature_importance(model);
    for (std::size_t c = 0; c < n_channels; ++c)
      for (std::size_t b = 0; b < n_bins; ++b)
        ranking.importance[c] += imp[c * n_bins + b];
    ranking.provenance.push_back(prov.kind + "(n_trees=" +
                                 std::to_string(prov.n_trees) + ")");
  }

  ranking.order.resize(n_channels);
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](int a, int b) {
                     return ranking.importance[a] > ranking.importance[b];
                   });
  return ranking;
}

std::vector<int> select_top(const ChannelRanking& ranking, int m) {
  int n = static_cast<int>(ranking.order.size());
  if (m < 1 || m > n)
    throw UsageError("channel count " + std::to_string(m) +
                     " out of range [1, " + std::to_string(n) + "]");
  return {ranking.order.begin(), ranking.order.begin() + m};
}

int pick_m_from_sweep(const std::vector<MSweepPoint>& sweep) {
  if (sweep.empty()) throw UsageError("empty channel-count sweep");
  std::vector<MSweepPoint> pts(sweep);
  std::sort(pts.begin(), pts.end(),
            [](const MSweepPoint& a, const MSweepPoint& b) { return a.m < b.m; });
  double best = pts[0].auc;
  for (const MSweepPoint& p : pts) best = std::max(best, p.auc);
  for (const MSweepPoint& p : pts)
    if (p.auc >= best - 0.01) return p.m;
  return pts.back().m;  // unreachable: the best point always qualifies
}

std::vector<int> default_m_grid(int n_channels) {
  if (n_channels < 1)
    throw UsageError("channel-count grid needs at least one channel");
  std::vector<int> grid{1, 2, 4};
  for (int p = 8; p <= n_channels; p *= 2) {
    grid.push_back(p);
    if (p + p / 2 <= n_channels) grid.push_back(p + p / 2);
  }
  std::erase_if(grid, [&](int m) { return m > n_channels; });
  grid.push_back(n_channels);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

MOptimizeResult optimize_m(const dataset::Dataset& ds,
                           std::span<const std::size_t> train_indices,
                           const ChannelRanking& ranking,
                           const MOptimizeConfig& config) {
  int n = static_cast<int>(ranking.order.size());
  std::vector<int> grid = config.grid.empty() ? default_m_grid(n) : config.grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (int m : grid)
    if (m < 1 || m > n)
      throw UsageError("sweep channel count " + std::to_string(m) +
                       " out of range [1, " + std::to_string(n) + "]");

  // One shared seed across the sweep keeps the inner folds identical for
  // every m, so the comparison varies only in the channel set.
  std::uint64_t inner_seed = derive_seed(config.rng_seed, "msweep");
  MOptimizeResult res;
  for (int m : grid) {
    std::vector<int> channels = select_top(ranking, m);
    double auc = eval::cv_combined_auc(ds, train_indices, channels,
                                       config.n_trees, inner_seed,
                                       config.threads);
    res.sweep.push_back({m, auc});
  }
  res.m = pick_m_from_sweep(res.sweep);
  return res;
}

void save_ranking(const std::filesystem::path& path, const StoredRanking& r) {
  json j;
  j["subject_id"] = r.subject_id;
  j["importance"] = r.ranking.importance;
  j["order"] = r.ranking.order;
  j["providers"] = r.ranking.provenance;
  j["seed"] = r.seed;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

StoredRanking load_ranking(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  StoredRanking r;
  try {
    json j = json::parse(in);
    r.subject_id = j.at("subject_id").get<std::string>();
    r.ranking.importance = j.at("importance").get<std::vector<double>>();
    r.ranking.order = j.at("order").get<std::vector<int>>();
    r.ranking.provenance = j.at("providers").get<std::vector<std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": invalid ranking file: " + e.what());
  }
  std::size_t n = r.ranking.importance.size();
  std::vector<bool> seen(n, false);
  if (r.ranking.order.size() != n)
    throw DataError(path.string() + ": order/importance length mismatch");
  for (int c : r.ranking.order) {
    if (c < 0 || static_cast<std::size_t>(c) >= n || seen[c])
      throw DataError(path.string() + ": order is not a permutation");
    seen[c] = true;
  }
  return r;
}

void save_channels(const std::filesystem::path& path, const StoredChannels& c) {
  json j;
  j["subject_id"] = c.subject_id;
  j["channels"] = c.channels;
  j["m"] = c.channels.size();
  j["m_mode"] = c.m_mode;
  if (!c.sweep.empty()) j["sweep"] = sweep_to_json(c.sweep);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

StoredChannels load_channels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  StoredChannels c;
  try {
    json j = json::parse(in);
    c.subject_id = j.at("subject_id").get<std::string>();
    c.channels = j.at("channels").get<std::vector<int>>();
    c.m_mode = j.at("m_mode").get<std::string>();
    if (j.contains("sweep")) c.sweep = sweep_from_json(j.at("sweep"));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": invalid channels file: " + e.what());
  }
  if (c.channels.empty())
    throw DataError(path.string() + ": empty channel list");
  return c;
}

}  // namespace seizdet::acs
