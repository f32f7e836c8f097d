#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seizdet/common.hpp"
#include "seizdet/dataset.hpp"

namespace seizdet::acs {

/// One importance provider. Only tree ensembles qualify; the shipped kind is
/// "random_forest". Importances from all providers are summed.
struct ProviderConfig {
  std::string kind = "random_forest";
  int n_trees = 300;
};

struct AcsConfig {
  std::vector<ProviderConfig> providers{ProviderConfig{}};
  int bin_lo_hz = 1;
  int bin_hi_hz = 30;
  std::uint64_t rng_seed = 0;
};

struct ChannelRanking {
  std::vector<double> importance;       // per channel, non-negative
  std::vector<int> order;               // descending importance; ties -> lower index
  std::vector<std::string> provenance;  // provider descriptions
};

/// Per-channel log-power representation of one epoch at its native sampling
/// rate: row c = log-power bins of channel c over [lo_hz, hi_hz].
Matrix acs_matrix(const dataset::Epoch& epoch, int lo_hz = 1, int hi_hz = 30);

/// Ranks channels by summed provider importance. Each provider trains on the
/// flattened per-bin features against binary labels (seizure vs interictal);
/// a channel's importance is the sum over its bins, summed across providers.
/// Pass only training epochs here — the ranking must never see validation
/// data.
ChannelRanking rank_channels(const dataset::Dataset& ds,
                             std::span<const std::size_t> train_indices,
                             const AcsConfig& config, int threads = 1);

/// First m entries of ranking.order; 1 <= m <= N.
std::vector<int> select_top(const ChannelRanking& ranking, int m);

struct MSweepPoint {
  int m = 0;
  double auc = 0.0;
};

/// Smallest m whose AUC is within 0.01 (absolute) of the sweep's best.
int pick_m_from_sweep(const std::vector<MSweepPoint>& sweep);

/// Candidate channel counts: {1, 2, 4, 8, 12, 16, 24, 32, 48, ...} clipped to
/// n_channels, with n_channels itself always included.
std::vector<int> default_m_grid(int n_channels);

struct MOptimizeConfig {
  std::vector<int> grid;  // empty = default_m_grid(N)
  int n_trees = 300;      // forest size inside the sweep's cross-validation
  std::uint64_t rng_seed = 0;
  int threads = 1;
};

struct MOptimizeResult {
  int m = 0;
  std::vector<MSweepPoint> sweep;
};

/// Per-subject channel-count optimization: for each grid value m, runs a
/// 2-fold cross-validation over train_indices with the top-m channels and
/// applies pick_m_from_sweep to the resulting AUCs.
MOptimizeResult optimize_m(const dataset::Dataset& ds,
                           std::span<const std::size_t> train_indices,
                           const ChannelRanking& ranking,
                           const MOptimizeConfig& config);

// --- persisted artifacts ------------------------------------------------
//
// Channel selection runs once per subject; later stages reload these files
// instead of re-ranking.

struct StoredRanking {
  std::string subject_id;
  ChannelRanking ranking;
  std::uint64_t seed = 0;
};

void save_ranking(const std::filesystem::path& path, const StoredRanking& r);
StoredRanking load_ranking(const std::filesystem::path& path);

struct StoredChannels {
  std::string subject_id;
  std::vector<int> channels;        // ordered, most important first
  std::string m_mode;               // "fixed" or "auto"
  std::vector<MSweepPoint> sweep;   // filled when m_mode == "auto"
};

void save_channels(const std::filesystem::path& path, const StoredChannels& c);
StoredChannels load_channels(const std::filesystem::path& path);

}  // namespace seizdet::acs
