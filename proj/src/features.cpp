#include "seizdet/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>

#include "seizdet/fft.hpp"

namespace seizdet::features {

std::vector<std::string> FeatureLayout::names() const {
  std::vector<std::string> out;
  out.reserve(total());
  char buf[32];
  for (std::size_t c = 0; c < m; ++c)
    for (int f = 1; f <= 47; ++f) {
      std::snprintf(buf, sizeof(buf), "ch%02zu_pow_%dhz", c, f);
      out.emplace_back(buf);
    }
  for (std::size_t i = 0; i < m; ++i) {
    std::snprintf(buf, sizeof(buf), "freq_eig_%02zu", i);
    out.emplace_back(buf);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      std::snprintf(buf, sizeof(buf), "corr_%02zu_%02zu", i, j);
      out.emplace_back(buf);
    }
  for (std::size_t i = 0; i < m; ++i) {
    std::snprintf(buf, sizeof(buf), "time_eig_%02zu", i);
    out.emplace_back(buf);
  }
  return out;
}

dataset::Epoch resample_to_400(const dataset::Epoch& epoch) {
  constexpr std::size_t kTarget = 400;
  const std::size_t n_in = epoch.n_samples();

  dataset::Epoch out;
  out.fs = 400.0;
  out.label = epoch.label;
  out.latency_s = epoch.latency_s;
  out.seizure_id = epoch.seizure_id;

  if (n_in == kTarget) {
    out.samples = epoch.samples;
    out.fs = epoch.fs;  // identity pass-through
    return out;
  }

  out.samples = Matrix(epoch.n_channels(), kTarget);
  const std::size_t keep = std::min(n_in, kTarget);
  const std::size_t nyq = keep / 2 + 1;  // positive bins incl. DC (+ Nyquist if even)
  const double scale = static_cast<double>(kTarget) / static_cast<double>(n_in);

  for (std::size_t c = 0; c < epoch.n_channels(); ++c) {
    auto spec = fft::forward(epoch.samples.row(c));
    std::vector<std::complex<double>> trunc(kTarget, {0.0, 0.0});
    for (std::size_t k = 0; k < nyq && k < kTarget; ++k) trunc[k] = spec[k];
    for (std::size_t k = nyq; k < keep; ++k)
      trunc[kTarget - (keep - k)] = spec[n_in - (keep - k)];
    if (keep % 2 == 0) {
      // shared Nyquist bin: fold when shrinking, split when growing
      const std::size_t h = keep / 2;
      if (kTarget < n_in) {
        trunc[h] = spec[h] + spec[n_in - h];
      } else {
        trunc[h] = spec[h] * 0.5;
        trunc[kTarget - h] = spec[h] * 0.5;
      }
    }
    auto resampled = fft::inverse_real(trunc);
    auto dst = out.samples.row(c);
    for (std::size_t t = 0; t < kTarget; ++t) dst[t] = resampled[t] * scale;
  }
  return out;
}

Spectrum log_power_bins(std::span<const double> signal, double fs, int lo, int hi) {
  if (!(lo >= 1 && lo < hi)) throw DataError("log_power_bins: need 1 <= lo < hi");
  if (static_cast<double>(hi) >= fs / 2.0)
    throw DataError("log_power_bins: band upper edge " + std::to_string(hi) +
                    " Hz not below Nyquist (fs=" + std::to_string(fs) + ")");
  const auto n = signal.size();
  if (n != static_cast<std::size_t>(std::llround(fs)))
    throw DataError("log_power_bins: signal length " + std::to_string(n) +
                    " != fs " + std::to_string(fs) + " (1 s epochs only)");
  auto spec = fft::forward(signal);
  Spectrum s;
  s.lo_hz = lo;
  s.hi_hz = hi;
  s.bins.resize(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k)
    s.bins[static_cast<std::size_t>(k - lo)] =
        std::log10(std::max(std::abs(spec[static_cast<std::size_t>(k)]), kLogFloor));
  return s;
}

Matrix zscore_rows(Matrix m) {
  const std::size_t cols = m.cols();
  if (cols < 2) throw DataError("zscore_rows: need at least 2 columns");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double mean = std::accumulate(row.begin(), row.end(), 0.0) /
                  static_cast<double>(cols);
    double var = 0.0;
    for (double v : row) {
      const double d = v - mean;
      var += d * d;
    }
    var /= static_cast<double>(cols);
    if (var <= 0.0) {
      std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    const double inv_sd = 1.0 / std::sqrt(var);
    for (auto& v : row) v = (v - mean) * inv_sd;
  }
  return m;
}

Matrix cross_matrix(const Matrix& r) {
  const std::size_t m = r.rows();
  const std::size_t k = r.cols();
  Matrix out(m, m);
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < m; ++i) {
    auto ri = r.row(i);
    for (std::size_t j = i; j < m; ++j) {
      auto rj = r.row(j);
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += ri[t] * rj[t];
      const double v = acc * inv_k;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

namespace {

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double off_diagonal_frobenius(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void check_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("sym_eigen: matrix not square");
  double max_abs = 0.0;
  for (double v : a.data()) max_abs = std::max(max_abs, std::abs(v));
  const double tol = 1e-12 * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol)
        throw DataError("sym_eigen: matrix not symmetric");
}

// Cyclic Jacobi. Converged when the off-diagonal Frobenius norm drops below
// 1e-10 * ||A||_F; hard cap of 100 sweeps.
void jacobi(Matrix a, std::vector<double>& values, Matrix* vectors) {
  const std::size_t n = a.rows();
  if (vectors) {
    *vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) (*vectors)(i, i) = 1.0;
  }
  values.resize(n);
  if (n == 1) {
    values[0] = a(0, 0);
    return;
  }
  const double norm = frobenius(a);
  const double target = 1e-10 * norm;

  bool converged = norm == 0.0;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*vectors)(k, p);
            const double vkq = (*vectors)(k, q);
            (*vectors)(k, p) = c * vkp - s * vkq;
            (*vectors)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    converged = off_diagonal_frobenius(a) < target;
  }
  if (!converged)
    throw NumericError("sym_eigen: Jacobi did not converge in 100 sweeps");

  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);

  // sort descending, permuting eigenvector columns alongside
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];
  values = std::move(sorted);
  if (vectors) {
    Matrix permuted(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) permuted(i, j) = (*vectors)(i, order[j]);
    *vectors = std::move(permuted);
  }
}

}  // namespace

std::vector<double> sym_eigenvalues(const Matrix& m) {
  check_symmetric(m);
  std::vector<double> values;
  jacobi(m, values, nullptr);
  return values;
}

EigenResult sym_eigen(const Matrix& m) {
  check_symmetric(m);
  EigenResult r;
  jacobi(m, r.values, &r.vectors);
  return r;
}

FeatureVector extract_features(const dataset::Epoch& epoch,
                               std::span<const int> selected_channels) {
  const std::size_t m = selected_channels.size();
  if (m == 0) throw DataError("extract_features: empty channel selection");
  {
    std::vector<int> seen(selected_channels.begin(), selected_channels.end());
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw DataError("extract_features: duplicate channel index");
    if (seen.front() < 0 || seen.back() >= static_cast<int>(epoch.n_channels()))
      throw DataError("extract_features: channel index out of range");
  }

  FeatureVector fv;
  fv.layout.m = m;
  fv.values.resize(fv.layout.total());

  // frequency path: raw log-power bins are emitted as features; their
  // z-scored version feeds the cross-spectral matrix
  Matrix power(m, 47);
  for (std::size_t i = 0; i < m; ++i) {
    auto spec = log_power_bins(epoch.samples.row(static_cast<std::size_t>(selected_channels[i])),
                               epoch.fs, 1, 47);
    auto dst = power.row(i);
    std::copy(spec.bins.begin(), spec.bins.end(), dst.begin());
  }
  std::copy(power.data().begin(), power.data().end(),
            fv.values.begin() + static_cast<std::ptrdiff_t>(fv.layout.freq_power_offset()));
  auto freq_eigs = sym_eigenvalues(cross_matrix(zscore_rows(std::move(power))));
  std::copy(freq_eigs.begin(), freq_eigs.end(),
            fv.values.begin() + static_cast<std::ptrdiff_t>(fv.layout.freq_eigs_offset()));

  // time path
  dataset::Epoch sub;
  sub.fs = epoch.fs;
  sub.samples = Matrix(m, epoch.n_samples());
  for (std::size_t i = 0; i < m; ++i) {
    auto src = epoch.samples.row(static_cast<std::size_t>(selected_channels[i]));
    auto dst = sub.samples.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  Matrix corr = cross_matrix(zscore_rows(resample_to_400(sub).samples));
  auto it = fv.values.begin() + static_cast<std::ptrdiff_t>(fv.layout.time_corr_offset());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) *it++ = corr(i, j);
  auto time_eigs = sym_eigenvalues(corr);
  std::copy(time_eigs.begin(), time_eigs.end(),
            fv.values.begin() + static_cast<std::ptrdiff_t>(fv.layout.time_eigs_offset()));

  return fv;
}

}  // namespace seizdet::features
