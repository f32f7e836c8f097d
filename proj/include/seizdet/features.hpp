#pragma once

#include <span>
#include <string>
#include <vector>

#include "seizdet/common.hpp"
#include "seizdet/dataset.hpp"

namespace seizdet::features {

/// Floor applied inside log10 so silent channels stay finite.
constexpr double kLogFloor = 1e-12;

/// log10 FFT magnitudes at integer frequencies, band [lo_hz, hi_hz] inclusive.
struct Spectrum {
  std::vector<double> bins;
  int lo_hz = 0;
  int hi_hz = 0;
};

/// Block layout of one feature vector over M selected channels:
///   freq_power  M x 47 log-power bins (1..47 Hz), channel-major
///   freq_eigs   M eigenvalues of the cross-spectral matrix, descending
///   time_corr   M(M-1)/2 upper-triangle correlations, row-major
///   time_eigs   M eigenvalues of the time correlation matrix, descending
struct FeatureLayout {
  std::size_t m = 0;

  std::size_t freq_power_size() const { return m * 47; }
  std::size_t freq_eigs_size() const { return m; }
  std::size_t time_corr_size() const { return m * (m - 1) / 2; }
  std::size_t time_eigs_size() const { return m; }
  std::size_t total() const {
    return freq_power_size() + freq_eigs_size() + time_corr_size() + time_eigs_size();
  }

  std::size_t freq_power_offset() const { return 0; }
  std::size_t freq_eigs_offset() const { return freq_power_size(); }
  std::size_t time_corr_offset() const { return freq_eigs_offset() + m; }
  std::size_t time_eigs_offset() const { return time_corr_offset() + time_corr_size(); }

  /// Column names for the CSV dump, e.g. ch03_pow_17hz, freq_eig_02,
  /// corr_03_07, time_eig_02. Indexes refer to positions in the selected
  /// channel list.
  std::vector<std::string> names() const;
};

struct FeatureVector {
  std::vector<double> values;
  FeatureLayout layout;

  std::span<const double> freq_power() const {
    return {values.data() + layout.freq_power_offset(), layout.freq_power_size()};
  }
  std::span<const double> freq_eigs() const {
    return {values.data() + layout.freq_eigs_offset(), layout.freq_eigs_size()};
  }
  std::span<const double> time_corr() const {
    return {values.data() + layout.time_corr_offset(), layout.time_corr_size()};
  }
  std::span<const double> time_eigs() const {
    return {values.data() + layout.time_eigs_offset(), layout.time_eigs_size()};
  }
};

/// Band-limited resample of a 1 s epoch to 400 Hz by FFT-domain
/// truncation/zero-padding. Exact pass-through when the input already is
/// 400 samples.
dataset::Epoch resample_to_400(const dataset::Epoch& epoch);

/// log10(max(|X[k]|, eps)) for k = lo..hi Hz. The signal must be a 1 s epoch
/// (length == fs) so the FFT grid spacing is exactly 1 Hz. Throws DataError
/// when hi >= fs/2.
Spectrum log_power_bins(std::span<const double> signal, double fs, int lo, int hi);

/// Normalizes each row to zero mean and unit population standard deviation.
/// Constant rows map to all-zeros.
Matrix zscore_rows(Matrix m);

/// (1/K) * R * R^T for z-scored rows R, i.e. the Pearson correlation matrix.
/// Constant (all-zero) rows yield zero rows/columns, including the diagonal.
Matrix cross_matrix(const Matrix& normalized_rows);

struct EigenResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
};

/// Eigenvalues of a symmetric matrix, sorted descending. Cyclic Jacobi
/// rotations; throws NumericError if 100 sweeps do not converge.
std::vector<double> sym_eigenvalues(const Matrix& m);

/// Full eigendecomposition (values descending, matching eigenvector columns).
EigenResult sym_eigen(const Matrix& m);

/// Concatenated feature vector for one epoch restricted to the given
/// channels, in the fixed order [freq_power, freq_eigs, time_corr,
/// time_eigs]. Pure: equal inputs give identical vectors.
FeatureVector extract_features(const dataset::Epoch& epoch,
                               std::span<const int> selected_channels);

}  // namespace seizdet::features
