#include "seizdet/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seizdet/acs.hpp"
#include "seizdet/common.hpp"
#include "seizdet/dataset.hpp"
#include "seizdet/eval.hpp"
#include "seizdet/features.hpp"
#include "seizdet/forest.hpp"

namespace seizdet::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

/// Hash of the algorithmic run configuration (paths excluded, so equal runs
/// into different directories still match). Echoed into every report.
std::string config_hash(const json& canonical) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.dump())));
  return buf;
}

struct ChannelSpec {
  bool auto_m = false;
  int m = 0;
};

ChannelSpec parse_channel_spec(const std::string& text) {
  if (text == "auto") return {true, 0};
  ChannelSpec spec;
  auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), spec.m);
  if (ec != std::errc{} || end != text.data() + text.size() || spec.m < 1)
    throw UsageError("--channels expects a positive count or 'auto', got '" +
                     text + "'");
  return spec;
}

std::vector<int> all_channel_list(int n) {
  std::vector<int> channels(n);
  std::iota(channels.begin(), channels.end(), 0);
  return channels;
}

/// Channel list for the downstream commands: either every channel, or the
/// per-subject stored selection (default location <out>/<subject>.channels.json).
std::vector<int> channels_for(const dataset::Dataset& ds,
                              const std::string& channels_file,
                              bool all_channels, const fs::path& out_dir) {
  if (all_channels) return all_channel_list(ds.manifest.n_channels);
  fs::path path = channels_file.empty()
                      ? out_dir / (ds.manifest.subject_id + ".channels.json")
                      : fs::path(channels_file);
  if (!fs::exists(path))
    throw DataError("channels file " + path.string() +
                    " not found; run `seizdet select-channels` first, or pass "
                    "--all-channels");
  return acs::load_channels(path).channels;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

void add_synth(CLI::App& app) {
  struct Opts {
    std::string config, out;
    std::uint64_t seed = 0;
  };
  auto opts = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  cmd->add_option("--config", opts->config, "generator config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "output directory")->required();
  CLI::Option* seed_opt =
      cmd->add_option("--seed", opts->seed, "override the config's rng_seed");
  cmd->callback([opts, seed_opt] {
    dataset::SynthConfig cfg = dataset::synth_config_from_json_file(opts->config);
    if (seed_opt->count()) cfg.rng_seed = opts->seed;
    dataset::Dataset ds = dataset::generate_synthetic(cfg, opts->out);
    std::cout << "wrote " << ds.manifest_path.string() << " ("
              << ds.epochs.size() << " epochs, " << ds.manifest.n_channels
              << " channels)\n";
  });
}

void add_select_channels(CLI::App& app) {
  struct Opts {
    std::string dataset, out, channels = "auto";
    int trees = 300;
    std::uint64_t seed = 0;
    bool force = false;
    int threads = 0;
  };
  auto opts = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "select-channels",
      "Rank channels by importance and store the per-subject selection");
  cmd->add_option("--dataset", opts->dataset, "dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--channels", opts->channels,
                  "channel count to keep, or 'auto' to optimize it");
  cmd->add_option("--trees", opts->trees,
                  "trees per importance provider (and per sweep forest)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "master RNG seed");
  cmd->add_flag("--force", opts->force, "recompute even if stored files exist");
  cmd->add_option("--threads", opts->threads, "worker threads (0 = all cores)");
  cmd->callback([opts] {
    ChannelSpec spec = parse_channel_spec(opts->channels);
    dataset::DatasetManifest mf = dataset::read_manifest(opts->dataset);
    fs::path out_dir(opts->out);
    fs::create_directories(out_dir);
    fs::path ranking_path = out_dir / (mf.subject_id + ".ranking.json");
    fs::path channels_path = out_dir / (mf.subject_id + ".channels.json");
    // the selection runs once per subject; later invocations with the same
    // parameters reuse the files, anything else recomputes
    if (!opts->force && fs::exists(ranking_path) && fs::exists(channels_path)) {
      bool fresh = false;
      try {
        acs::StoredRanking sr = acs::load_ranking(ranking_path);
        acs::StoredChannels sc = acs::load_channels(channels_path);
        const std::string provider =
            "random_forest(n_trees=" + std::to_string(opts->trees) + ")";
        fresh = sr.seed == opts->seed &&
                sr.ranking.provenance == std::vector<std::string>{provider} &&
                sc.m_mode == (spec.auto_m ? "auto" : "fixed") &&
                (spec.auto_m ||
                 sc.channels.size() == static_cast<std::size_t>(spec.m));
      } catch (const DataError&) {
        fresh = false;  // unreadable cache files are recomputed, not fatal
      }
      if (fresh) {
        std::cout << "cached: " << ranking_path.string() << " and "
                  << channels_path.string() << " (use --force to recompute)\n";
        return;
      }
    }
    int threads = resolve_threads(opts->threads);
    dataset::Dataset ds = dataset::load_dataset(opts->dataset, threads);
    std::vector<std::size_t> all(ds.epochs.size());
    std::iota(all.begin(), all.end(), 0);

    acs::AcsConfig ac;
    ac.providers[0].n_trees = opts->trees;
    ac.rng_seed = derive_seed(opts->seed, "select-channels");
    acs::ChannelRanking ranking = acs::rank_channels(ds, all, ac, threads);

    acs::StoredChannels sc;
    sc.subject_id = ds.manifest.subject_id;
    if (spec.auto_m) {
      acs::MOptimizeConfig mc;
      mc.n_trees = opts->trees;
      mc.rng_seed = derive_seed(opts->seed, "m-sweep");
      mc.threads = threads;
      acs::MOptimizeResult res = acs::optimize_m(ds, all, ranking, mc);
      std::cout << "m-sweep:\n";
      for (const acs::MSweepPoint& p : res.sweep)
        std::cout << "  m=" << p.m << " auc=" << fmt("%.4f", p.auc) << "\n";
      std::cout << "chosen m=" << res.m << "\n";
      sc.m_mode = "auto";
      sc.sweep = res.sweep;
      sc.channels = acs::select_top(ranking, res.m);
    } else {
      sc.m_mode = "fixed";
      sc.channels = acs::select_top(ranking, spec.m);
    }
    acs::save_ranking(ranking_path, {ds.manifest.subject_id, ranking, opts->seed});
    acs::save_channels(channels_path, sc);
    std::cout << "wrote " << ranking_path.string() << "\n"
              << "wrote " << channels_path.string() << "\n";
  });
}

void add_features(CLI::App& app) {
  struct Opts {
    std::string dataset, out, channels_file;
    bool all_channels = false;
    int threads = 0;
  };
  auto opts = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "features", "Extract feature vectors for every epoch into a CSV");
  cmd->add_option("--dataset", opts->dataset, "dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "output CSV file")->required();
  cmd->add_option("--channels-file", opts->channels_file,
                  "stored channel selection (default: alongside --out)");
  cmd->add_flag("--all-channels", opts->all_channels, "use every channel");
  cmd->add_option("--threads", opts->threads, "worker threads (0 = all cores)");
  cmd->callback([opts] {
    int threads = resolve_threads(opts->threads);
    dataset::Dataset ds = dataset::load_dataset(opts->dataset, threads);
    fs::path out_path(opts->out);
    std::vector<int> channels = channels_for(
        ds, opts->channels_file, opts->all_channels, out_path.parent_path());
    features::FeatureLayout layout{channels.size()};

    std::string csv = "epoch,label,latency_s,seizure_id";
    for (const std::string& name : layout.names()) csv += "," + name;
    csv += "\n";
    for (std::size_t i = 0; i < ds.epochs.size(); ++i) {
      const dataset::Epoch& ep = ds.epochs[i];
      features::FeatureVector fv = features::extract_features(ep, channels);
      csv += std::to_string(i) + "," + dataset::to_string(ep.label) + "," +
             std::to_string(ep.latency_s) + "," + ep.seizure_id;
      for (double v : fv.values) csv += "," + fmt("%.17g", v);
      csv += "\n";
    }
    write_text(out_path, csv);
    std::cout << "wrote " << out_path.string() << " (" << ds.epochs.size()
              << " rows, " << layout.total() << " features)\n";
  });
}

void add_train(CLI::App& app) {
  struct Opts {
    std::string dataset, out, channels_file, mode = "three_class";
    bool all_channels = false;
    int trees = 300;
    std::uint64_t seed = 0;
    int threads = 0;
  };
  auto opts = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "train", "Train a forest on the whole dataset and store the model");
  cmd->add_option("--dataset", opts->dataset, "dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--channels-file", opts->channels_file,
                  "stored channel selection (default: <out>/<subject>.channels.json)");
  cmd->add_flag("--all-channels", opts->all_channels, "use every channel");
  cmd->add_option("--trees", opts->trees, "forest size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mode", opts->mode, "classifier target")
      ->check(CLI::IsMember({"three_class", "binary"}));
  cmd->add_option("--seed", opts->seed, "master RNG seed");
  cmd->add_option("--threads", opts->threads, "worker threads (0 = all cores)");
  cmd->callback([opts] {
    int threads = resolve_threads(opts->threads);
    dataset::Dataset ds = dataset::load_dataset(opts->dataset, threads);
    fs::path out_dir(opts->out);
    fs::create_directories(out_dir);
    std::vector<int> channels =
        channels_for(ds, opts->channels_file, opts->all_channels, out_dir);

    features::FeatureLayout layout{channels.size()};
    Matrix x(ds.epochs.size(), layout.total());
    std::vector<int> y(ds.epochs.size());
    for (std::size_t i = 0; i < ds.epochs.size(); ++i) {
      features::FeatureVector fv =
          features::extract_features(ds.epochs[i], channels);
      std::copy(fv.values.begin(), fv.values.end(), x.row(i).begin());
      y[i] = static_cast<int>(dataset::class3_of(ds.epochs[i]));
    }
    forest::ForestParams fp;
    fp.n_trees = opts->trees;
    fp.rng_seed = derive_seed(opts->seed, "train-forest");
    if (opts->mode == "binary") {
      fp.class_mode = forest::ClassMode::binary;
      y = forest::to_binary_labels(y);
    }
    forest::ForestModel model = forest::train(x, y, fp, threads);
    fs::path model_path = out_dir / (ds.manifest.subject_id + ".model.json");
    forest::save_model(model_path, model);
    std::cout << "wrote " << model_path.string() << " (" << opts->trees
              << " trees, " << layout.total() << " features)\n";
  });
}

void add_evaluate(CLI::App& app) {
  struct Opts {
    std::string dataset, out, channels_file, format = "json";
    bool all_channels = false;
    int trees = 300;
    std::uint64_t seed = 0;
    int threads = 0;
  };
  auto opts = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "evaluate", "Two-fold cross-validated metrics with the stored channels");
  cmd->add_option("--dataset", opts->dataset, "dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--channels-file", opts->channels_file,
                  "stored channel selection (default: <out>/<subject>.channels.json)");
  cmd->add_flag("--all-channels", opts->all_channels, "use every channel");
  cmd->add_option("--trees", opts->trees, "forest size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "master RNG seed");
  cmd->add_option("--format", opts->format,
                  "'csv' additionally writes the ROC points")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", opts->threads, "worker threads (0 = all cores)");
  cmd->callback([opts] {
    int threads = resolve_threads(opts->threads);
    dataset::Dataset ds = dataset::load_dataset(opts->dataset, threads);
    fs::path out_dir(opts->out);
    fs::create_directories(out_dir);
    std::vector<int> channels =
        channels_for(ds, opts->channels_file, opts->all_channels, out_dir);

    eval::EvalReport rep = eval::two_fold_cv_fixed_channels(
        ds, channels, opts->trees, derive_seed(opts->seed, "evaluate"), threads);

    json j = json::parse(eval::report_to_json(rep));
    j["subject_id"] = ds.manifest.subject_id;
    j["seed"] = opts->seed;
    j["channels"] = channels;
    j["config_hash"] = config_hash(json{{"command", "evaluate"},
                                        {"subject_id", ds.manifest.subject_id},
                                        {"channels", channels},
                                        {"trees", opts->trees},
                                        {"seed", opts->seed}});
    fs::path report_path = out_dir / (ds.manifest.subject_id + ".report.json");
    write_text(report_path, j.dump(2) + "\n");

    std::cout << "auc=" << fmt("%.4f", rep.auc) << " (s=" << fmt("%.4f", rep.auc_s)
              << " e=" << fmt("%.4f", rep.auc_e) << ") sen="
              << fmt("%.4f", rep.sensitivity) << " spe="
              << fmt("%.4f", rep.specificity) << " threshold="
              << fmt("%.4f", rep.threshold) << " mean_delay="
              << fmt("%.2f", rep.mean_delay_s) << "s missed="
              << rep.missed_seizures.size() << "\n";
    std::cout << "wrote " << report_path.string() << "\n";
    if (opts->format == "csv") {
      fs::path roc_path = out_dir / (ds.manifest.subject_id + ".roc.csv");
      write_text(roc_path, eval::roc_points_csv(rep));
      std::cout << "wrote " << roc_path.string() << "\n";
    }
  });
}

void add_benchmark(CLI::App& app) {
  struct Opts {
    std::string dataset, out;
    int m = 16;
    int trees = 100;
    int acs_trees = 100;
    std::uint64_t seed = 0;
    int threads = 0;
  };
  auto opts = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand(
      "benchmark",
      "Time feature extraction and training, all channels vs the top M");
  cmd->add_option("--dataset", opts->dataset, "dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--channels", opts->m, "reduced channel count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--trees", opts->trees, "forest size in the timed sections")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--acs-trees", opts->acs_trees,
                  "provider size for the one-time ranking")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "master RNG seed");
  cmd->add_option("--threads", opts->threads,
                  "worker threads for dataset loading only; timed sections "
                  "always run on one thread");
  cmd->callback([opts] {
    dataset::Dataset ds =
        dataset::load_dataset(opts->dataset, resolve_threads(opts->threads));
    fs::path out_dir(opts->out);
    fs::create_directories(out_dir);
    eval::BenchmarkConfig bc{opts->trees, opts->acs_trees,
                             derive_seed(opts->seed, "benchmark")};
    eval::TimingReport rep = eval::benchmark(ds, opts->m, bc);

    json j = json::parse(eval::timing_to_json(rep));
    j["subject_id"] = ds.manifest.subject_id;
    j["seed"] = opts->seed;
    j["config_hash"] = config_hash(json{{"command", "benchmark"},
                                        {"subject_id", ds.manifest.subject_id},
                                        {"m", opts->m},
                                        {"trees", opts->trees},
                                        {"acs_trees", opts->acs_trees},
                                        {"seed", opts->seed}});
    fs::path timing_path = out_dir / (ds.manifest.subject_id + ".timing.json");
    write_text(timing_path, j.dump(2) + "\n");

    double base = rep.baseline_feature_time_s + rep.baseline_training_time_s;
    double reduced = rep.feature_time_s + rep.training_time_s;
    std::cout << "improvement=" << fmt("%.1f", rep.improvement * 100.0)
              << "% (baseline " << fmt("%.2f", base) << "s -> reduced "
              << fmt("%.2f", reduced) << "s; acs " << fmt("%.2f", rep.acs_time_s)
              << "s, reported separately)\n";
    std::cout << "wrote " << timing_path.string() << "\n";
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"iEEG seizure detection: channel selection, spectral/temporal "
               "features, random-forest classification, evaluation"};
  app.set_version_flag("--version", "seizdet 1.0.0");
  app.require_subcommand(1);
  add_synth(app);
  add_select_channels(app);
  add_features(app);
  add_train(app);
  add_evaluate(app);
  add_benchmark(app);
  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace seizdet::cli
