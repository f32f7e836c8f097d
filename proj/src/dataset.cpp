#include "seizdet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seizdet/fft.hpp"

namespace seizdet::dataset {

namespace {

constexpr char kMagic[5] = {'I', 'E', 'E', 'G', '1'};

void fail(const std::filesystem::path& path, const std::string& reason) {
  throw DataError(path.string() + ": " + reason);
}

void check_epoch_invariants(const Epoch& e, const std::filesystem::path& path) {
  if (e.n_channels() < 1) fail(path, "epoch has no channels");
  const auto expected = static_cast<std::size_t>(std::llround(e.fs));
  if (e.n_samples() != expected)
    fail(path, "epoch is not exactly 1 s: " + std::to_string(e.n_samples()) +
                   " samples at fs=" + std::to_string(e.fs));
  if (!e.samples.all_finite()) fail(path, "non-finite sample value");
}

}  // namespace

std::string to_string(Label label) {
  switch (label) {
    case Label::interictal: return "interictal";
    case Label::ictal: return "ictal";
    case Label::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

Label label_from_string(const std::string& s) {
  if (s == "interictal") return Label::interictal;
  if (s == "ictal") return Label::ictal;
  if (s == "unlabeled") return Label::unlabeled;
  throw DataError("unknown label: '" + s + "'");
}

std::string to_string(ClassLabel3 c) {
  switch (c) {
    case ClassLabel3::early_ictal: return "early_ictal";
    case ClassLabel3::ictal: return "ictal";
    case ClassLabel3::interictal: return "interictal";
  }
  return "interictal";
}

ClassLabel3 class3_of(const Epoch& epoch) {
  switch (epoch.label) {
    case Label::interictal:
      return ClassLabel3::interictal;
    case Label::ictal:
      return epoch.latency_s < kEarlySeconds ? ClassLabel3::early_ictal
                                             : ClassLabel3::ictal;
    case Label::unlabeled:
      break;
  }
  throw DataError("class3_of: epoch is unlabeled");
}

std::vector<std::size_t> Dataset::interictal_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < epochs.size(); ++i)
    if (epochs[i].label == Label::interictal) out.push_back(i);
  return out;
}

std::vector<std::size_t> Dataset::ictal_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < epochs.size(); ++i)
    if (epochs[i].label == Label::ictal) out.push_back(i);
  return out;
}

std::map<std::string, std::vector<std::size_t>> Dataset::seizures() const {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < epochs.size(); ++i)
    if (epochs[i].label == Label::ictal) groups[epochs[i].seizure_id].push_back(i);
  for (auto& [id, idx] : groups)
    std::sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
      return epochs[a].latency_s < epochs[b].latency_s;
    });
  return groups;
}

// --- binary format ----------------------------------------------------------

void write_epoch_binary(const std::filesystem::path& path, const Epoch& epoch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  const auto n_ch = static_cast<std::uint32_t>(epoch.n_channels());
  const auto n_sm = static_cast<std::uint32_t>(epoch.n_samples());
  out.write(kMagic, 5);
  out.write(reinterpret_cast<const char*>(&n_ch), 4);
  out.write(reinterpret_cast<const char*>(&n_sm), 4);
  out.write(reinterpret_cast<const char*>(&epoch.fs), 8);
  std::vector<float> row(n_sm);
  for (std::size_t c = 0; c < n_ch; ++c) {
    auto src = epoch.samples.row(c);
    for (std::size_t t = 0; t < n_sm; ++t) row[t] = static_cast<float>(src[t]);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(n_sm * sizeof(float)));
  }
  if (!out) fail(path, "write failed");
}

Epoch read_epoch_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "missing file");
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, kMagic, 5) != 0) fail(path, "bad magic");
  std::uint32_t n_ch = 0, n_sm = 0;
  double fs = 0.0;
  in.read(reinterpret_cast<char*>(&n_ch), 4);
  in.read(reinterpret_cast<char*>(&n_sm), 4);
  in.read(reinterpret_cast<char*>(&fs), 8);
  if (!in) fail(path, "truncated header");
  if (n_ch == 0 || n_sm == 0) fail(path, "empty epoch");
  Epoch e;
  e.fs = fs;
  e.samples = Matrix(n_ch, n_sm);
  std::vector<float> row(n_sm);
  for (std::uint32_t c = 0; c < n_ch; ++c) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(n_sm * sizeof(float)));
    if (!in) fail(path, "truncated samples");
    auto dst = e.samples.row(c);
    for (std::uint32_t t = 0; t < n_sm; ++t) dst[t] = row[t];
  }
  return e;
}

// --- CSV format -------------------------------------------------------------

void write_epoch_csv(const std::filesystem::path& path, const Epoch& epoch) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out.precision(9);
  for (std::size_t c = 0; c < epoch.n_channels(); ++c) {
    auto row = epoch.samples.row(c);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t) out << ',';
      out << row[t];
    }
    out << '\n';
  }
}

Epoch read_epoch_csv(const std::filesystem::path& path, double fs) {
  std::ifstream in(path);
  if (!in) fail(path, "missing file");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) fail(path, "unparsable CSV value");
      row.push_back(v);
      p = next;
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end) {
        if (*p != ',') fail(path, "expected ',' in CSV row");
        ++p;
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "empty CSV epoch");
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) fail(path, "ragged CSV rows");
  Epoch e;
  e.fs = fs;
  e.samples = Matrix(rows.size(), rows[0].size());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    auto dst = e.samples.row(c);
    std::copy(rows[c].begin(), rows[c].end(), dst.begin());
  }
  return e;
}

// --- manifest ---------------------------------------------------------------

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": missing manifest");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": manifest parse error: " + e.what());
  }
  DatasetManifest m;
  try {
    m.subject_id = j.at("subject_id").get<std::string>();
    m.fs = j.at("fs").get<double>();
    m.n_channels = j.at("n_channels").get<int>();
    for (const auto& seg : j.at("segments")) {
      SegmentInfo s;
      s.file = seg.at("file").get<std::string>();
      s.label = label_from_string(seg.at("label").get<std::string>());
      if (s.label == Label::ictal) {
        s.latency_s = seg.at("latency_s").get<int>();
        s.seizure_id = seg.at("seizure_id").get<std::string>();
        if (s.latency_s < 0) fail(path, "negative latency_s in " + s.file);
        if (s.seizure_id.empty()) fail(path, "empty seizure_id in " + s.file);
      } else {
        if (seg.contains("latency_s") || seg.contains("seizure_id"))
          fail(path, s.file + ": latency_s/seizure_id only valid on ictal segments");
      }
      m.segments.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": manifest field error: " + e.what());
  }
  if (m.fs <= 0) fail(path, "fs must be positive");
  if (m.n_channels < 1) fail(path, "n_channels must be >= 1");
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  nlohmann::json j;
  j["subject_id"] = m.subject_id;
  j["fs"] = m.fs;
  j["n_channels"] = m.n_channels;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : m.segments) {
    nlohmann::json seg;
    seg["file"] = s.file;
    seg["label"] = to_string(s.label);
    if (s.label == Label::ictal) {
      seg["latency_s"] = s.latency_s;
      seg["seizure_id"] = s.seizure_id;
    }
    segs.push_back(std::move(seg));
  }
  j["segments"] = std::move(segs);
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& manifest_path, int threads) {
  Dataset ds;
  ds.manifest = read_manifest(manifest_path);
  ds.manifest_path = manifest_path;
  const auto base = manifest_path.parent_path();
  const auto& segs = ds.manifest.segments;
  ds.epochs.resize(segs.size());

  std::vector<std::string> errors(segs.size());
  parallel_for(segs.size(), threads, [&](std::size_t i) {
    const auto& seg = segs[i];
    const auto path = base / seg.file;
    try {
      Epoch e = seg.file.size() > 4 && seg.file.ends_with(".csv")
                    ? read_epoch_csv(path, ds.manifest.fs)
                    : read_epoch_binary(path);
      e.label = seg.label;
      e.latency_s = seg.latency_s;
      e.seizure_id = seg.seizure_id;
      check_epoch_invariants(e, path);
      if (static_cast<int>(e.n_channels()) != ds.manifest.n_channels)
        fail(path, "channel-count mismatch: epoch has " +
                       std::to_string(e.n_channels()) + ", manifest says " +
                       std::to_string(ds.manifest.n_channels));
      if (e.fs != ds.manifest.fs)
        fail(path, "fs mismatch: epoch " + std::to_string(e.fs) +
                       ", manifest " + std::to_string(ds.manifest.fs));
      ds.epochs[i] = std::move(e);
    } catch (const DataError& err) {
      errors[i] = err.what();
    }
  });
  for (const auto& err : errors)
    if (!err.empty()) throw DataError(err);

  // latency runs per seizure must be contiguous from 0
  for (const auto& [id, idx] : ds.seizures()) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (ds.epochs[idx[k]].latency_s != static_cast<int>(k))
        throw DataError(manifest_path.string() + ": seizure '" + id +
                        "' has non-contiguous latency run (expected " +
                        std::to_string(k) + ", got " +
                        std::to_string(ds.epochs[idx[k]].latency_s) + ")");
    }
  }

  bool any_ictal = false, any_interictal = false, any_labeled = false;
  for (const auto& e : ds.epochs) {
    any_ictal |= e.label == Label::ictal;
    any_interictal |= e.label == Label::interictal;
    any_labeled |= e.label != Label::unlabeled;
  }
  if (any_labeled && (!any_ictal || !any_interictal))
    throw DataError(manifest_path.string() +
                    ": labeled dataset needs at least one ictal and one "
                    "interictal segment");
  return ds;
}

// --- synthetic generator ----------------------------------------------------

SynthConfig synth_config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": missing config");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": config parse error: " + e.what());
  }
  SynthConfig c;
  try {
    if (j.contains("subject_id")) c.subject_id = j.at("subject_id").get<std::string>();
    c.n_channels = j.at("n_channels").get<int>();
    c.fs = j.at("fs").get<double>();
    c.n_seizures = j.at("n_seizures").get<int>();
    c.seizure_len_s = j.at("seizure_len_s").get<int>();
    c.interictal_len_s = j.at("interictal_len_s").get<int>();
    c.planted_channels = j.at("planted_channels").get<std::vector<int>>();
    c.seizure_band_lo_hz = j.at("seizure_band_hz").at(0).get<double>();
    c.seizure_band_hi_hz = j.at("seizure_band_hz").at(1).get<double>();
    if (j.contains("shared_component_gain"))
      c.shared_component_gain = j.at("shared_component_gain").get<double>();
    if (j.contains("noise_gain")) c.noise_gain = j.at("noise_gain").get<double>();
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": config field error: " + e.what());
  }
  return c;
}

namespace {

void validate(const SynthConfig& c) {
  auto field_error = [](const std::string& field, const std::string& why) {
    throw DataError("synth config field '" + field + "': " + why);
  };
  if (c.n_channels < 1) field_error("n_channels", "must be >= 1");
  if (c.fs < 96.0) field_error("fs", "must be >= 96 (band 1-47 Hz needs fs/2 > 47)");
  if (c.n_seizures < 0) field_error("n_seizures", "must be >= 0");
  if (c.seizure_len_s < 1 && c.n_seizures > 0)
    field_error("seizure_len_s", "must be >= 1");
  if (c.interictal_len_s < 0) field_error("interictal_len_s", "must be >= 0");
  for (int ch : c.planted_channels)
    if (ch < 0 || ch >= c.n_channels)
      field_error("planted_channels",
                  "index " + std::to_string(ch) + " outside [0, " +
                      std::to_string(c.n_channels) + ")");
  if (!(c.seizure_band_lo_hz >= 1.0 && c.seizure_band_lo_hz < c.seizure_band_hi_hz &&
        c.seizure_band_hi_hz <= 47.0))
    field_error("seizure_band_hz", "need 1 <= lo < hi <= 47");
  if (c.shared_component_gain < 0) field_error("shared_component_gain", "must be >= 0");
  if (c.noise_gain < 0) field_error("noise_gain", "must be >= 0");
}

// 1/f-shaped background: white Gaussian noise whose spectrum is scaled by
// k^-1/2, i.e. power ~ 1/f.
std::vector<double> colored_noise(std::size_t n, double gain, Rng& rng) {
  std::vector<double> white(n);
  for (auto& v : white) v = rng.normal();
  auto spec = fft::forward(white);
  spec[0] = 0.0;  // zero mean
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double g = 1.0 / std::sqrt(static_cast<double>(k));
    spec[k] *= g;
    if (k != n - k) spec[n - k] *= g;
  }
  auto shaped = fft::inverse_real(spec);
  for (auto& v : shaped) v *= gain;
  return shaped;
}

}  // namespace

Dataset generate_synthetic(const SynthConfig& config,
                           const std::filesystem::path& out_dir) {
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw DataError(out_dir.string() + ": cannot create output directory");

  const auto n = static_cast<std::size_t>(std::llround(config.fs));
  const int lo = static_cast<int>(std::lround(config.seizure_band_lo_hz));
  const int hi = static_cast<int>(std::lround(config.seizure_band_hi_hz));
  // Planted oscillation amplitude relative to the background level.
  const double tone_amp = 0.5 * config.noise_gain;

  Rng rng(config.rng_seed);
  DatasetManifest manifest;
  manifest.subject_id = config.subject_id;
  manifest.fs = config.fs;
  manifest.n_channels = config.n_channels;

  Dataset ds;

  auto emit = [&](Epoch&& e, const std::string& name) {
    write_epoch_binary(out_dir / name, e);
    SegmentInfo seg;
    seg.file = name;
    seg.label = e.label;
    seg.latency_s = e.latency_s;
    seg.seizure_id = e.seizure_id;
    manifest.segments.push_back(seg);
    ds.epochs.push_back(std::move(e));
  };

  auto background = [&]() {
    Epoch e;
    e.fs = config.fs;
    e.samples = Matrix(static_cast<std::size_t>(config.n_channels), n);
    for (int c = 0; c < config.n_channels; ++c) {
      auto noise = colored_noise(n, config.noise_gain, rng);
      auto dst = e.samples.row(static_cast<std::size_t>(c));
      std::copy(noise.begin(), noise.end(), dst.begin());
    }
    return e;
  };

  char name[64];
  for (int i = 0; i < config.interictal_len_s; ++i) {
    Epoch e = background();
    e.label = Label::interictal;
    std::snprintf(name, sizeof(name), "interictal_%04d.ieeg", i);
    emit(std::move(e), name);
  }

  // planted_channels is a set; iterate it in index order so the RNG stream
  // does not depend on config-file ordering
  std::vector<int> planted = config.planted_channels;
  std::sort(planted.begin(), planted.end());
  planted.erase(std::unique(planted.begin(), planted.end()), planted.end());

  const double two_pi = 6.283185307179586476925286766559;
  for (int s = 0; s < config.n_seizures; ++s) {
    char sid[16];
    std::snprintf(sid, sizeof(sid), "sz%02d", s);
    for (int t = 0; t < config.seizure_len_s; ++t) {
      Epoch e = background();
      e.label = Label::ictal;
      e.latency_s = t;
      e.seizure_id = sid;

      // Band-limited oscillation on the planted channels, present from onset.
      for (int ch : planted) {
        auto row = e.samples.row(static_cast<std::size_t>(ch));
        for (int f = lo; f <= hi; ++f) {
          const double phase = two_pi * rng.uniform();
          const double w = two_pi * f / config.fs;
          for (std::size_t k = 0; k < n; ++k)
            row[k] += tone_amp * std::cos(w * static_cast<double>(k) + phase);
        }
      }

      // Shared broadband component on all channels. Its gain ramps over the
      // early window, so correlation rises as the seizure progresses.
      const double ramp =
          std::min(1.0, static_cast<double>(t + 1) / kEarlySeconds);
      const double g = config.shared_component_gain * config.noise_gain * ramp;
      if (g > 0.0) {
        std::vector<double> shared(n);
        for (auto& v : shared) v = rng.normal();
        for (int ch = 0; ch < config.n_channels; ++ch) {
          auto row = e.samples.row(static_cast<std::size_t>(ch));
          for (std::size_t k = 0; k < n; ++k) row[k] += g * shared[k];
        }
      }

      std::snprintf(name, sizeof(name), "%s_t%03d.ieeg", sid, t);
      emit(std::move(e), name);
    }
  }

  write_manifest(out_dir / "manifest.json", manifest);
  ds.manifest = std::move(manifest);
  ds.manifest_path = out_dir / "manifest.json";
  return ds;
}

}  // namespace seizdet::dataset
