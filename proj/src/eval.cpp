#include "seizdet/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"
#include "seizdet/features.hpp"
#include "seizdet/forest.hpp"

namespace seizdet::eval {
namespace {

using nlohmann::json;

void check_binary_input(std::span<const double> scores,
                        std::span<const int> positives, const char* who) {
  if (scores.size() != positives.size())
    throw DataError(std::string(who) + ": scores and labels differ in length");
  if (scores.empty()) throw DataError(std::string(who) + ": empty input");
  for (double s : scores)
    if (!std::isfinite(s))
      throw DataError(std::string(who) + ": non-finite score");
  bool pos = false, neg = false;
  for (int p : positives) (p ? pos : neg) = true;
  if (!pos || !neg)
    throw DataError(std::string(who) +
                    " requires at least one positive and one negative");
}

std::string fold_tag(int fold, const char* stage) {
  return "fold" + std::to_string(fold) + "-" + stage;
}

struct ProtocolOptions {
  int n_trees = 300;
  std::uint64_t seed = 0;
  int threads = 1;
  bool binary_metrics = true;
};

EvalReport run_protocol(
    const dataset::Dataset& ds, std::span<const std::size_t> pool,
    const std::function<std::vector<int>(const FoldIndices&, int)>& channels_for,
    const ProtocolOptions& opt) {
  auto folds = make_folds(ds, pool, opt.seed);
  EvalReport rep;
  for (int f = 0; f < 2; ++f) {
    const FoldIndices& fi = folds[f];
    FoldDetail fd;
    fd.fold = f;
    fd.train_seizures = fi.train_seizures;
    fd.val_seizures = fi.val_seizures;
    fd.channels = channels_for(fi, f);

    features::FeatureLayout layout{fd.channels.size()};
    auto fill = [&](const std::vector<std::size_t>& idxs, Matrix& x,
                    std::vector<int>& y3) {
      x = Matrix(idxs.size(), layout.total());
      y3.resize(idxs.size());
      for (std::size_t row = 0; row < idxs.size(); ++row) {
        features::FeatureVector fv =
            features::extract_features(ds.epochs[idxs[row]], fd.channels);
        std::copy(fv.values.begin(), fv.values.end(), x.row(row).begin());
        y3[row] = static_cast<int>(dataset::class3_of(ds.epochs[idxs[row]]));
      }
    };
    Matrix xtr, xva;
    std::vector<int> ytr, yva;
    fill(fi.train, xtr, ytr);
    fill(fi.val, xva, yva);
    auto inter = static_cast<int>(dataset::ClassLabel3::interictal);
    fd.n_train_interictal = std::count(ytr.begin(), ytr.end(), inter);
    fd.n_val_interictal = std::count(yva.begin(), yva.end(), inter);

    forest::ForestParams p3;
    p3.n_trees = opt.n_trees;
    p3.class_mode = forest::ClassMode::three_class;
    p3.rng_seed = derive_seed(opt.seed, fold_tag(f, "forest3"));
    forest::ForestModel m3 = forest::train(xtr, ytr, p3, opt.threads);

    std::size_t n_va = fi.val.size();
    std::vector<double> score_s(n_va), score_e(n_va);
    std::vector<int> pos_s(n_va), pos_e(n_va);
    for (std::size_t row = 0; row < n_va; ++row) {
      std::vector<double> pr = forest::predict_proba(m3, xva.row(row));
      score_s[row] = pr[0] + pr[1];
      score_e[row] = pr[0];
      pos_s[row] = yva[row] != inter;
      pos_e[row] = yva[row] == static_cast<int>(dataset::ClassLabel3::early_ictal);
    }
    fd.roc_s = roc_auc(score_s, pos_s);
    fd.roc_e = roc_auc(score_e, pos_e);
    fd.auc_s = fd.roc_s.auc;
    fd.auc_e = fd.roc_e.auc;
    fd.auc = (fd.auc_s + fd.auc_e) / 2.0;

    if (opt.binary_metrics) {
      std::vector<int> ytr_b = forest::to_binary_labels(ytr);
      std::vector<int> yva_b = forest::to_binary_labels(yva);
      forest::ForestParams pb = p3;
      pb.class_mode = forest::ClassMode::binary;
      pb.rng_seed = derive_seed(opt.seed, fold_tag(f, "forestB"));
      forest::ForestModel mb = forest::train(xtr, ytr_b, pb, opt.threads);

      std::vector<double> tr_scores(fi.train.size());
      for (std::size_t row = 0; row < fi.train.size(); ++row)
        tr_scores[row] = forest::predict_proba(mb, xtr.row(row))[1];
      fd.threshold = select_threshold(tr_scores, ytr_b);

      std::vector<double> va_scores(n_va);
      for (std::size_t row = 0; row < n_va; ++row)
        va_scores[row] = forest::predict_proba(mb, xva.row(row))[1];
      SenSpe ss = sen_spe(va_scores, yva_b, fd.threshold);
      fd.sensitivity = ss.sensitivity;
      fd.specificity = ss.specificity;

      // per-seizure score traces of the validation half, in latency order
      std::map<std::string, std::vector<std::pair<int, double>>> traces;
      for (std::size_t row = 0; row < n_va; ++row) {
        const dataset::Epoch& ep = ds.epochs[fi.val[row]];
        if (ep.label == dataset::Label::ictal)
          traces[ep.seizure_id].push_back({ep.latency_s, va_scores[row]});
      }
      std::vector<SeizureScores> seizures;
      for (auto& [id, tr] : traces) {
        std::sort(tr.begin(), tr.end());
        SeizureScores sz;
        sz.seizure_id = id;
        for (auto& [lat, sc] : tr) {
          sz.latencies_s.push_back(lat);
          sz.scores.push_back(sc);
        }
        seizures.push_back(std::move(sz));
      }
      DelayResult dr = detection_delay(seizures, fd.threshold);
      fd.delays_s = dr.delays_s;
      fd.missed = dr.missed;
      fd.mean_delay_s = dr.mean_delay_s;
      rep.per_seizure_delays_s.insert(dr.delays_s.begin(), dr.delays_s.end());
      rep.missed_seizures.insert(rep.missed_seizures.end(), dr.missed.begin(),
                                 dr.missed.end());
    }
    rep.folds.push_back(std::move(fd));
  }

  rep.auc_s = (rep.folds[0].auc_s + rep.folds[1].auc_s) / 2.0;
  rep.auc_e = (rep.folds[0].auc_e + rep.folds[1].auc_e) / 2.0;
  rep.auc = (rep.auc_s + rep.auc_e) / 2.0;
  if (opt.binary_metrics) {
    rep.sensitivity =
        (rep.folds[0].sensitivity + rep.folds[1].sensitivity) / 2.0;
    rep.specificity =
        (rep.folds[0].specificity + rep.folds[1].specificity) / 2.0;
    rep.threshold = (rep.folds[0].threshold + rep.folds[1].threshold) / 2.0;
    double sum = 0.0;
    int detected_folds = 0;
    for (const FoldDetail& fd : rep.folds)
      if (fd.mean_delay_s >= 0.0) {
        sum += fd.mean_delay_s;
        ++detected_folds;
      }
    rep.mean_delay_s = detected_folds ? sum / detected_folds : -1.0;
  }
  return rep;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json fold_to_json(const FoldDetail& fd) {
  auto roc_points = [](const RocCurve& c) {
    json arr = json::array();
    for (const RocPoint& p : c.points) arr.push_back({p.fpr, p.tpr});
    return arr;
  };
  return json{{"fold", fd.fold},
              {"channels", fd.channels},
              {"auc_s", fd.auc_s},
              {"auc_e", fd.auc_e},
              {"auc", fd.auc},
              {"sensitivity", fd.sensitivity},
              {"specificity", fd.specificity},
              {"threshold", fd.threshold},
              {"mean_delay_s", fd.mean_delay_s},
              {"delays_s", fd.delays_s},
              {"missed", fd.missed},
              {"train_seizures", fd.train_seizures},
              {"val_seizures", fd.val_seizures},
              {"n_train_interictal", fd.n_train_interictal},
              {"n_val_interictal", fd.n_val_interictal},
              {"roc_s", roc_points(fd.roc_s)},
              {"roc_e", roc_points(fd.roc_e)}};
}

}  // namespace

RocCurve roc_auc(std::span<const double> scores, std::span<const int> positives) {
  check_binary_input(scores, positives, "roc_auc");
  std::size_t n = scores.size();
  double n_pos = 0, n_neg = 0;
  for (int p : positives) (p ? n_pos : n_neg) += 1;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  double tp = 0, fp = 0, prev_fpr = 0, prev_tpr = 0, auc = 0;
  std::size_t i = 0;
  while (i < n) {
    double s = scores[idx[i]];
    // equal scores form a single ROC step (ties count half under the curve)
    while (i < n && scores[idx[i]] == s) {
      (positives[idx[i]] ? tp : fp) += 1;
      ++i;
    }
    double fpr = fp / n_neg;
    double tpr = tp / n_pos;
    auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    curve.points.push_back({fpr, tpr});
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  curve.auc = auc;
  return curve;
}

CombinedAuc combined_auc(const Matrix& posteriors3,
                         std::span<const int> labels3) {
  if (posteriors3.cols() != 3)
    throw DataError("combined_auc needs three-class posteriors, got " +
                    std::to_string(posteriors3.cols()) + " columns");
  if (posteriors3.rows() != labels3.size())
    throw DataError("combined_auc: posterior/label count mismatch");
  std::size_t n = labels3.size();
  std::vector<double> score_s(n), score_e(n);
  std::vector<int> pos_s(n), pos_e(n);
  for (std::size_t i = 0; i < n; ++i) {
    int y = labels3[i];
    if (y < 0 || y > 2) throw DataError("combined_auc: label out of range");
    score_s[i] = posteriors3(i, 0) + posteriors3(i, 1);
    score_e[i] = posteriors3(i, 0);
    pos_s[i] = y != static_cast<int>(dataset::ClassLabel3::interictal);
    pos_e[i] = y == static_cast<int>(dataset::ClassLabel3::early_ictal);
  }
  CombinedAuc out;
  out.auc_s = roc_auc(score_s, pos_s).auc;
  out.auc_e = roc_auc(score_e, pos_e).auc;
  out.auc = (out.auc_s + out.auc_e) / 2.0;
  return out;
}

double select_threshold(std::span<const double> scores,
                        std::span<const int> positives) {
  check_binary_input(scores, positives, "select_threshold");
  double n_pos = 0, n_neg = 0;
  for (int p : positives) (p ? n_pos : n_neg) += 1;

  std::vector<std::pair<double, int>> sorted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    sorted[i] = {scores[i], positives[i] ? 1 : 0};
  std::sort(sorted.begin(), sorted.end());

  // unique values with counts of positives/negatives at score >= value
  std::vector<double> uniq;
  std::vector<double> pos_ge, neg_ge;
  for (std::size_t i = 0; i < sorted.size();) {
    double v = sorted[i].first;
    uniq.push_back(v);
    pos_ge.push_back(0);
    neg_ge.push_back(0);
    while (i < sorted.size() && sorted[i].first == v) {
      (sorted[i].second ? pos_ge.back() : neg_ge.back()) += 1;
      ++i;
    }
  }
  for (std::size_t k = uniq.size() - 1; k-- > 0;) {
    pos_ge[k] += pos_ge[k + 1];
    neg_ge[k] += neg_ge[k + 1];
  }

  double best_t = 0, best_d = std::numeric_limits<double>::infinity(),
         best_sen = -1;
  auto consider = [&](double t, double tp, double fp) {
    double sen = tp / n_pos;
    double spe = (n_neg - fp) / n_neg;
    double d = std::abs(sen - spe);
    // candidates arrive in ascending threshold order, so strict improvement
    // implements the tie-break: higher SEN, then lower threshold
    if (d < best_d || (d == best_d && sen > best_sen)) {
      best_d = d;
      best_sen = sen;
      best_t = t;
    }
  };
  consider(-std::numeric_limits<double>::infinity(), n_pos, n_neg);
  for (std::size_t k = 1; k < uniq.size(); ++k) {
    double mid = 0.5 * (uniq[k - 1] + uniq[k]);
    if (mid <= uniq[k - 1]) mid = uniq[k];  // keep the same partition exactly
    consider(mid, pos_ge[k], neg_ge[k]);
  }
  consider(std::numeric_limits<double>::infinity(), 0, 0);
  return best_t;
}

SenSpe sen_spe(std::span<const double> scores, std::span<const int> positives,
               double threshold) {
  check_binary_input(scores, positives, "sen_spe");
  double tp = 0, fn = 0, fp = 0, tn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool hit = scores[i] >= threshold;
    if (positives[i])
      (hit ? tp : fn) += 1;
    else
      (hit ? fp : tn) += 1;
  }
  return {tp / (tp + fn), tn / (tn + fp)};
}

DelayResult detection_delay(const std::vector<SeizureScores>& seizures,
                            double threshold) {
  DelayResult out;
  std::set<std::string> seen;
  for (const SeizureScores& sz : seizures) {
    if (sz.scores.empty() || sz.latencies_s.empty())
      throw DataError("detection_delay: empty seizure '" + sz.seizure_id + "'");
    if (sz.scores.size() != sz.latencies_s.size())
      throw DataError("detection_delay: score/latency length mismatch in '" +
                      sz.seizure_id + "'");
    if (!std::is_sorted(sz.latencies_s.begin(), sz.latencies_s.end()))
      throw DataError("detection_delay: epochs of '" + sz.seizure_id +
                      "' are not in latency order");
    if (!seen.insert(sz.seizure_id).second)
      throw DataError("detection_delay: duplicate seizure '" + sz.seizure_id +
                      "'");
    bool detected = false;
    for (std::size_t i = 0; i < sz.scores.size(); ++i) {
      if (sz.scores[i] >= threshold) {
        out.delays_s[sz.seizure_id] = sz.latencies_s[i] + 1.0;
        detected = true;
        break;
      }
    }
    if (!detected) out.missed.push_back(sz.seizure_id);
  }
  if (!out.delays_s.empty()) {
    double sum = 0;
    for (auto& [id, d] : out.delays_s) sum += d;
    out.mean_delay_s = sum / static_cast<double>(out.delays_s.size());
  }
  return out;
}

double improvement(double reduced_feature_s, double reduced_training_s,
                   double baseline_feature_s, double baseline_training_s) {
  double base = baseline_feature_s + baseline_training_s;
  if (base <= 0.0)
    throw DataError("improvement: baseline time must be positive");
  return 1.0 - (reduced_feature_s + reduced_training_s) / base;
}

std::array<FoldIndices, 2> make_folds(const dataset::Dataset& ds,
                                      std::span<const std::size_t> pool,
                                      std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> seiz;
  std::vector<std::size_t> inter;
  for (std::size_t i : pool) {
    const dataset::Epoch& ep = ds.epochs[i];
    if (dataset::class3_of(ep) == dataset::ClassLabel3::interictal)
      inter.push_back(i);
    else
      seiz[ep.seizure_id].push_back(i);
  }
  if (seiz.size() < 2)
    throw DataError("two-fold cross-validation needs at least 2 seizures, got " +
                    std::to_string(seiz.size()));
  if (inter.size() < 2)
    throw DataError(
        "two-fold cross-validation needs at least 2 interictal epochs, got " +
        std::to_string(inter.size()));
  for (auto& [id, idxs] : seiz)
    std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
      return ds.epochs[a].latency_s < ds.epochs[b].latency_s;
    });

  std::array<FoldIndices, 2> folds;
  std::size_t k = 0;
  std::size_t s_half = (seiz.size() + 1) / 2;
  for (auto& [id, idxs] : seiz) {
    bool first_half = k++ < s_half;
    FoldIndices& tr_of = folds[first_half ? 0 : 1];
    FoldIndices& va_of = folds[first_half ? 1 : 0];
    tr_of.train.insert(tr_of.train.end(), idxs.begin(), idxs.end());
    tr_of.train_seizures.push_back(id);
    va_of.val.insert(va_of.val.end(), idxs.begin(), idxs.end());
    va_of.val_seizures.push_back(id);
  }
  Rng rng(derive_seed(seed, "interictal-split"));
  std::vector<std::size_t> shuffled(inter);
  rng.shuffle(shuffled);
  std::size_t i_half = (shuffled.size() + 1) / 2;
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    bool first_half = i < i_half;
    folds[first_half ? 0 : 1].train.push_back(shuffled[i]);
    folds[first_half ? 1 : 0].val.push_back(shuffled[i]);
  }
  return folds;
}

std::array<FoldIndices, 2> make_folds(const dataset::Dataset& ds,
                                      std::uint64_t seed) {
  std::vector<std::size_t> pool(ds.epochs.size());
  std::iota(pool.begin(), pool.end(), 0);
  return make_folds(ds, pool, seed);
}

EvalReport two_fold_cv(const dataset::Dataset& ds, const PipelineConfig& cfg) {
  std::vector<std::size_t> pool(ds.epochs.size());
  std::iota(pool.begin(), pool.end(), 0);
  auto channels_for = [&](const FoldIndices& fi, int f) {
    acs::AcsConfig ac = cfg.acs;
    ac.rng_seed = derive_seed(cfg.rng_seed, fold_tag(f, "acs"));
    acs::ChannelRanking ranking =
        acs::rank_channels(ds, fi.train, ac, cfg.threads);
    int m = cfg.m;
    if (m <= 0) {
      acs::MOptimizeConfig mc;
      mc.n_trees = cfg.n_trees;
      mc.rng_seed = derive_seed(cfg.rng_seed, fold_tag(f, "msweep"));
      mc.threads = cfg.threads;
      m = acs::optimize_m(ds, fi.train, ranking, mc).m;
    }
    return acs::select_top(ranking, m);
  };
  return run_protocol(ds, pool, channels_for,
                      {cfg.n_trees, cfg.rng_seed, cfg.threads, true});
}

EvalReport two_fold_cv_fixed_channels(const dataset::Dataset& ds,
                                      const std::vector<int>& channels,
                                      int n_trees, std::uint64_t seed,
                                      int threads) {
  std::vector<std::size_t> pool(ds.epochs.size());
  std::iota(pool.begin(), pool.end(), 0);
  auto channels_for = [&](const FoldIndices&, int) { return channels; };
  return run_protocol(ds, pool, channels_for, {n_trees, seed, threads, true});
}

double cv_combined_auc(const dataset::Dataset& ds,
                       std::span<const std::size_t> pool,
                       const std::vector<int>& channels, int n_trees,
                       std::uint64_t seed, int threads) {
  auto channels_for = [&](const FoldIndices&, int) { return channels; };
  return run_protocol(ds, pool, channels_for, {n_trees, seed, threads, false})
      .auc;
}

TimingReport benchmark(const dataset::Dataset& ds, int m_reduced,
                       const BenchmarkConfig& cfg) {
  int n_channels = ds.manifest.n_channels;
  if (m_reduced < 1 || m_reduced > n_channels)
    throw UsageError("benchmark channel count " + std::to_string(m_reduced) +
                     " out of range [1, " + std::to_string(n_channels) + "]");

  std::vector<std::size_t> all(ds.epochs.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> y3(ds.epochs.size());
  for (std::size_t i = 0; i < ds.epochs.size(); ++i)
    y3[i] = static_cast<int>(dataset::class3_of(ds.epochs[i]));

  auto time_once = [](const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  };
  auto median3 = [&](const std::function<void()>& fn) {
    fn();  // warm-up, discarded
    std::array<double, 3> t{time_once(fn), time_once(fn), time_once(fn)};
    std::sort(t.begin(), t.end());
    return t[1];
  };

  TimingReport rep;
  rep.threads = 1;  // every timed section below runs single-threaded
  rep.n_channels = n_channels;
  rep.m_reduced = m_reduced;
  rep.n_epochs = ds.epochs.size();
  rep.n_trees = cfg.n_trees;
  rep.acs_trees = cfg.acs_trees;

  acs::AcsConfig ac;
  ac.providers[0].n_trees = cfg.acs_trees;
  ac.rng_seed = derive_seed(cfg.rng_seed, "benchmark-acs");
  acs::ChannelRanking ranking;
  rep.acs_time_s = median3([&] { ranking = acs::rank_channels(ds, all, ac, 1); });

  std::vector<int> reduced = acs::select_top(ranking, m_reduced);
  std::vector<int> full(n_channels);
  std::iota(full.begin(), full.end(), 0);

  auto extract_all = [&](const std::vector<int>& channels, Matrix& out) {
    features::FeatureLayout layout{channels.size()};
    out = Matrix(ds.epochs.size(), layout.total());
    for (std::size_t i = 0; i < ds.epochs.size(); ++i) {
      features::FeatureVector fv =
          features::extract_features(ds.epochs[i], channels);
      std::copy(fv.values.begin(), fv.values.end(), out.row(i).begin());
    }
  };
  Matrix xb, xr;
  rep.baseline_feature_time_s = median3([&] { extract_all(full, xb); });
  rep.feature_time_s = median3([&] { extract_all(reduced, xr); });

  forest::ForestParams fp;
  fp.n_trees = cfg.n_trees;
  fp.class_mode = forest::ClassMode::three_class;
  fp.rng_seed = derive_seed(cfg.rng_seed, "benchmark-forest");
  rep.baseline_training_time_s = median3([&] { forest::train(xb, y3, fp, 1); });
  rep.training_time_s = median3([&] { forest::train(xr, y3, fp, 1); });

  rep.improvement = improvement(rep.feature_time_s, rep.training_time_s,
                                rep.baseline_feature_time_s,
                                rep.baseline_training_time_s);
  return rep;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  j["auc_s"] = report.auc_s;
  j["auc_e"] = report.auc_e;
  j["auc"] = report.auc;
  j["sensitivity"] = report.sensitivity;
  j["specificity"] = report.specificity;
  j["threshold"] = report.threshold;
  j["per_seizure_delays_s"] = report.per_seizure_delays_s;
  j["missed_seizures"] = report.missed_seizures;
  j["mean_delay_s"] = report.mean_delay_s;
  json folds = json::array();
  for (const FoldDetail& fd : report.folds) folds.push_back(fold_to_json(fd));
  j["folds"] = std::move(folds);
  return j.dump(2);
}

std::string timing_to_json(const TimingReport& report) {
  json j;
  j["acs_time_s"] = report.acs_time_s;
  j["feature_time_s"] = report.feature_time_s;
  j["training_time_s"] = report.training_time_s;
  j["baseline_feature_time_s"] = report.baseline_feature_time_s;
  j["baseline_training_time_s"] = report.baseline_training_time_s;
  j["improvement"] = report.improvement;
  j["threads"] = report.threads;
  j["n_channels"] = report.n_channels;
  j["m_reduced"] = report.m_reduced;
  j["n_epochs"] = report.n_epochs;
  j["n_trees"] = report.n_trees;
  j["acs_trees"] = report.acs_trees;
  j["runs_per_measurement"] = report.runs_per_measurement;
  j["warmup_discarded"] = true;
  return j.dump(2);
}

std::string roc_points_csv(const EvalReport& report) {
  std::string out = "fold,curve,fpr,tpr\n";
  for (const FoldDetail& fd : report.folds) {
    for (const RocPoint& p : fd.roc_s.points)
      out += std::to_string(fd.fold) + ",s," + fmt17(p.fpr) + "," +
             fmt17(p.tpr) + "\n";
    for (const RocPoint& p : fd.roc_e.points)
      out += std::to_string(fd.fold) + ",e," + fmt17(p.fpr) + "," +
             fmt17(p.tpr) + "\n";
  }
  return out;
}

}  // namespace seizdet::eval
