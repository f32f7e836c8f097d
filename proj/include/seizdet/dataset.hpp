#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seizdet/common.hpp"

namespace seizdet::dataset {

enum class Label { interictal, ictal, unlabeled };

std::string to_string(Label label);
Label label_from_string(const std::string& s);

/// One 1-second multi-channel iEEG segment. samples is channels x time.
struct Epoch {
  Matrix samples;
  double fs = 0.0;
  Label label = Label::unlabeled;
  // Seconds between seizure onset and this epoch's first sample. Only
  // meaningful for ictal epochs, -1 otherwise.
  int latency_s = -1;
  // Groups the consecutive ictal epochs of one seizure. Empty unless ictal.
  std::string seizure_id;

  std::size_t n_channels() const { return samples.rows(); }
  std::size_t n_samples() const { return samples.cols(); }
};

/// Three-state classification target. Early ictal is an ictal epoch whose
/// latency is strictly below 15 s (seconds 0..14 of the seizure).
enum class ClassLabel3 : int { early_ictal = 0, ictal = 1, interictal = 2 };

constexpr int kEarlySeconds = 15;

std::string to_string(ClassLabel3 c);

/// Maps a labeled epoch onto its three-state class. Throws DataError for
/// unlabeled epochs.
ClassLabel3 class3_of(const Epoch& epoch);

struct SegmentInfo {
  std::string file;  // relative to the manifest's directory
  Label label = Label::unlabeled;
  int latency_s = -1;
  std::string seizure_id;
};

struct DatasetManifest {
  std::string subject_id;
  double fs = 0.0;
  int n_channels = 0;
  std::vector<SegmentInfo> segments;
};

/// Loaded dataset: epochs[i] corresponds to manifest.segments[i].
struct Dataset {
  DatasetManifest manifest;
  std::vector<Epoch> epochs;
  std::filesystem::path manifest_path;

  std::vector<std::size_t> interictal_indices() const;
  std::vector<std::size_t> ictal_indices() const;
  /// Ictal epoch indices grouped by seizure id, each group ordered by
  /// latency. Map is ordered by id, which fixes the fold-split order.
  std::map<std::string, std::vector<std::size_t>> seizures() const;
};

// --- epoch file formats -----------------------------------------------------
//
// Binary (.ieeg): little-endian header {magic "IEEG1", u32 n_channels,
// u32 n_samples, f64 fs} followed by row-major 32-bit floats. Round-trips
// bit-exactly. CSV (one row per channel) is a secondary ingest format for
// hand-crafted fixtures.

void write_epoch_binary(const std::filesystem::path& path, const Epoch& epoch);
Epoch read_epoch_binary(const std::filesystem::path& path);

void write_epoch_csv(const std::filesystem::path& path, const Epoch& epoch);
Epoch read_epoch_csv(const std::filesystem::path& path, double fs);

// --- manifest ---------------------------------------------------------------

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

/// Loads a subject dataset and validates every invariant: channel counts,
/// finite samples, 1 s epoch length, latency presence and contiguity per
/// seizure, and both classes present when the dataset is labeled. Errors name
/// the offending file. Epoch loading parallelizes over files.
Dataset load_dataset(const std::filesystem::path& manifest_path, int threads = 1);

// --- synthetic data ---------------------------------------------------------

/// Generator configuration. Interictal epochs are independent 1/f-shaped
/// noise per channel. Ictal epochs add a band-limited oscillation on the
/// planted channels plus one broadband component shared by all channels whose
/// gain ramps up over the first 15 s of the seizure, so inter-channel
/// correlation rises as the seizure progresses.
struct SynthConfig {
  std::string subject_id = "synthetic";
  int n_channels = 16;
  double fs = 400.0;
  int n_seizures = 2;
  int seizure_len_s = 30;
  int interictal_len_s = 120;
  std::vector<int> planted_channels;
  double seizure_band_lo_hz = 4.0;
  double seizure_band_hi_hz = 8.0;
  double shared_component_gain = 1.0;
  double noise_gain = 1.0;
  std::uint64_t rng_seed = 0;
};

SynthConfig synth_config_from_json_file(const std::filesystem::path& path);

/// Writes epoch files plus manifest.json under out_dir and returns the loaded
/// dataset. Deterministic: equal seeds produce bit-identical files.
Dataset generate_synthetic(const SynthConfig& config,
                           const std::filesystem::path& out_dir);

}  // namespace seizdet::dataset
