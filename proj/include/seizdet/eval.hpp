#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seizdet/acs.hpp"
#include "seizdet/common.hpp"
#include "seizdet/dataset.hpp"

namespace seizdet::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) .. (1,1), both coordinates monotone
  double auc = 0.0;
};

/// Trapezoidal ROC over the score sweep, equal scores grouped into one step.
/// Equivalent to the Mann-Whitney statistic with ties counted 1/2. positives
/// is 0/1 per score; both classes must be present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> positives);

struct CombinedAuc {
  double auc_s = 0.0;  // seizure (early + ictal) vs interictal
  double auc_e = 0.0;  // early vs everything else
  double auc = 0.0;    // (auc_s + auc_e) / 2
};

/// posteriors3 is n x 3 in class order [early_ictal, ictal, interictal];
/// labels3 holds the matching ClassLabel3 values. score_S = P(early)+P(ictal)
/// against all ictal epochs; score_E = P(early) against early epochs only.
CombinedAuc combined_auc(const Matrix& posteriors3, std::span<const int> labels3);

/// Balanced threshold: candidates are midpoints between consecutive sorted
/// unique scores plus -inf/+inf sentinels; picks the candidate minimizing
/// |SEN - SPE|, ties broken by higher SEN, then lower threshold. The
/// classification rule everywhere is score >= threshold => seizure.
double select_threshold(std::span<const double> scores,
                        std::span<const int> positives);

struct SenSpe {
  double sensitivity = 0.0;
  double specificity = 0.0;
};

SenSpe sen_spe(std::span<const double> scores, std::span<const int> positives,
               double threshold);

/// Scores of one seizure's epochs in latency order.
struct SeizureScores {
  std::string seizure_id;
  std::vector<int> latencies_s;
  std::vector<double> scores;
};

struct DelayResult {
  std::map<std::string, double> delays_s;  // detected seizures only
  std::vector<std::string> missed;
  double mean_delay_s = -1.0;  // -1 when nothing was detected
};

/// Onset-detection delay per seizure: latency of the first epoch scoring
/// >= threshold, plus 1 s (an immediate detection is a 1 s delay). Seizures
/// with no detected epoch go to `missed` and are excluded from the mean.
DelayResult detection_delay(const std::vector<SeizureScores>& seizures,
                            double threshold);

/// 1 - (reduced feature + training time) / (baseline feature + training
/// time). ACS time is excluded and reported separately.
double improvement(double reduced_feature_s, double reduced_training_s,
                   double baseline_feature_s, double baseline_training_s);

// --- cross-validation protocol -------------------------------------------

struct FoldIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::string> train_seizures;
  std::vector<std::string> val_seizures;
};

/// Two folds over `pool`: seizures split by sorted seizure_id (first half
/// ceil-sized trains fold 0), interictal epochs split by a seeded shuffle.
/// Every seizure lands wholly on one side of each fold.
std::array<FoldIndices, 2> make_folds(const dataset::Dataset& ds,
                                      std::span<const std::size_t> pool,
                                      std::uint64_t seed);
std::array<FoldIndices, 2> make_folds(const dataset::Dataset& ds,
                                      std::uint64_t seed);

struct FoldDetail {
  int fold = 0;
  std::vector<int> channels;
  double auc_s = 0.0, auc_e = 0.0, auc = 0.0;
  double sensitivity = -1.0, specificity = -1.0, threshold = 0.0;
  double mean_delay_s = -1.0;
  std::map<std::string, double> delays_s;
  std::vector<std::string> missed;
  std::vector<std::string> train_seizures, val_seizures;
  std::size_t n_train_interictal = 0, n_val_interictal = 0;
  RocCurve roc_s, roc_e;
};

struct EvalReport {
  double auc_s = 0.0, auc_e = 0.0;
  double auc = 0.0;  // always (auc_s + auc_e) / 2 of the fields above
  double sensitivity = -1.0, specificity = -1.0, threshold = 0.0;
  std::map<std::string, double> per_seizure_delays_s;
  std::vector<std::string> missed_seizures;
  double mean_delay_s = -1.0;
  std::vector<FoldDetail> folds;
};

struct PipelineConfig {
  acs::AcsConfig acs;          // ranking providers; per-fold seeds derived
  int m = 8;                   // top-M channels; 0 = optimize per fold
  int n_trees = 300;           // 3-class and binary forest size
  std::uint64_t rng_seed = 0;
  int threads = 1;
};

/// Full protocol: per fold, channel selection on the training half only,
/// a 3-class forest for the AUCs, a binary forest plus balanced threshold
/// (chosen on training scores) for SEN/SPE and delays, all metrics computed
/// on the validation half; the report averages the folds.
EvalReport two_fold_cv(const dataset::Dataset& ds, const PipelineConfig& cfg);

/// Same protocol with a fixed channel list (the deployment flow: channels
/// come from the stored per-subject selection).
EvalReport two_fold_cv_fixed_channels(const dataset::Dataset& ds,
                                      const std::vector<int>& channels,
                                      int n_trees, std::uint64_t seed,
                                      int threads = 1);

/// Fold-averaged combined AUC over `pool` with a fixed channel list; the
/// channel-count sweep's inner loop. Skips the binary stage.
double cv_combined_auc(const dataset::Dataset& ds,
                       std::span<const std::size_t> pool,
                       const std::vector<int>& channels, int n_trees,
                       std::uint64_t seed, int threads = 1);

// --- timing benchmark ------------------------------------------------------

struct BenchmarkConfig {
  int n_trees = 100;      // forest size in the timed training sections
  int acs_trees = 100;    // provider size for the one-time ranking
  std::uint64_t rng_seed = 0;
};

struct TimingReport {
  double acs_time_s = 0.0;  // one-time cost, excluded from improvement
  double feature_time_s = 0.0;
  double training_time_s = 0.0;
  double baseline_feature_time_s = 0.0;
  double baseline_training_time_s = 0.0;
  double improvement = 0.0;
  int threads = 1;  // timed sections always run single-threaded
  int n_channels = 0;
  int m_reduced = 0;
  std::size_t n_epochs = 0;
  int n_trees = 0;
  int acs_trees = 0;
  int runs_per_measurement = 3;  // median; one extra warm-up run discarded
};

/// Times feature extraction and training over all N channels (baseline) and
/// over the top-M channels, median of 3 runs after a discarded warm-up,
/// monotonic clock, single-threaded. ACS runs once and is timed separately.
TimingReport benchmark(const dataset::Dataset& ds, int m_reduced,
                       const BenchmarkConfig& cfg = {});

// --- serialization -----------------------------------------------------

std::string report_to_json(const EvalReport& report);
std::string timing_to_json(const TimingReport& report);

/// ROC points of every fold as CSV (fold, curve s|e, fpr, tpr).
std::string roc_points_csv(const EvalReport& report);

}  // namespace seizdet::eval
