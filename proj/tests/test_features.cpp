#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "seizdet/common.hpp"
#include "seizdet/dataset.hpp"
#include "seizdet/features.hpp"
#include "seizdet/fft.hpp"

using namespace seizdet;
using namespace seizdet::features;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// O(n^2) reference DFT, written from the definition so the FFT backend is
// checked against something that shares no code with it.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -kTwoPi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

dataset::Epoch tone_epoch(double fs, double f, double amp, double phase) {
  const auto n = static_cast<std::size_t>(fs);
  dataset::Epoch e;
  e.fs = fs;
  e.samples = Matrix(1, n);
  auto row = e.samples.row(0);
  for (std::size_t t = 0; t < n; ++t)
    row[t] = amp * std::cos(kTwoPi * f * static_cast<double>(t) / fs + phase);
  return e;
}

dataset::Epoch noise_epoch(std::size_t n_ch, double fs, std::uint64_t seed) {
  dataset::Epoch e;
  e.fs = fs;
  e.samples = Matrix(n_ch, static_cast<std::size_t>(fs));
  Rng rng(seed);
  for (auto& v : e.samples.data()) v = rng.normal();
  return e;
}

double frob(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("fft matches the textbook DFT") {
  for (std::size_t n : {8u, 100u, 128u, 250u}) {
    auto x = random_signal(n, 1000 + n);
    auto fast = fft::forward(x);
    auto slow = naive_dft(x);
    REQUIRE(fast.size() == n);
    double max_mag = 0.0;
    for (const auto& v : slow) max_mag = std::max(max_mag, std::abs(v));
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(fast[k] - slow[k]) <= 1e-9 * max_mag);

    auto back = fft::inverse_real(fast);
    for (std::size_t t = 0; t < n; ++t)
      CHECK(back[t] == doctest::Approx(x[t]).epsilon(1e-10));
  }
}

TEST_CASE("resample_to_400 is the identity at 400 Hz") {
  auto e = noise_epoch(3, 400.0, 2);
  e.label = dataset::Label::ictal;
  e.latency_s = 4;
  e.seizure_id = "sz00";
  auto out = resample_to_400(e);
  CHECK(out.n_samples() == 400);
  CHECK(out.fs == 400.0);
  CHECK(out.label == e.label);
  CHECK(out.latency_s == 4);
  CHECK(out.seizure_id == "sz00");
  for (std::size_t i = 0; i < e.samples.data().size(); ++i)
    CHECK(out.samples.data()[i] == e.samples.data()[i]);
}

TEST_CASE("resample_to_400 reproduces band-limited tones exactly") {
  // downsample and upsample cases; tones sit well below both Nyquists
  for (double fs : {500.0, 512.0, 320.0, 250.0}) {
    for (double f : {3.0, 17.0, 47.0}) {
      const double phase = 0.9;
      auto e = tone_epoch(fs, f, 1.3, phase);
      auto out = resample_to_400(e);
      REQUIRE(out.n_samples() == 400);
      CHECK(out.fs == 400.0);
      auto row = out.samples.row(0);
      for (std::size_t t = 0; t < 400; ++t) {
        const double want =
            1.3 * std::cos(kTwoPi * f * static_cast<double>(t) / 400.0 + phase);
        CHECK(row[t] == doctest::Approx(want).epsilon(1e-9));
      }

      // the strongest 1..47 Hz bin after resampling is still f
      auto spec = log_power_bins(out.samples.row(0), 400.0, 1, 47);
      auto it = std::max_element(spec.bins.begin(), spec.bins.end());
      CHECK(static_cast<int>(it - spec.bins.begin()) + 1 == static_cast<int>(f));
    }
  }
}

TEST_CASE("resample_to_400 is idempotent") {
  auto e = noise_epoch(2, 500.0, 3);
  auto once = resample_to_400(e);
  auto twice = resample_to_400(once);
  for (std::size_t i = 0; i < once.samples.data().size(); ++i)
    CHECK(twice.samples.data()[i] == once.samples.data()[i]);
}

TEST_CASE("log_power_bins recovers tone amplitudes") {
  // |X[f]| of cos with amplitude A over n samples is A*n/2
  const double fs = 400.0;
  for (double f : {1.0, 12.0, 47.0}) {
    for (double amp : {0.25, 1.0, 50.0}) {
      auto e = tone_epoch(fs, f, amp, 0.4);
      auto spec = log_power_bins(e.samples.row(0), fs, 1, 47);
      REQUIRE(spec.bins.size() == 47);
      const double want = std::log10(amp * fs / 2.0);
      CHECK(spec.bins[static_cast<std::size_t>(f) - 1] ==
            doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("log_power_bins floors silent channels at 1e-12") {
  std::vector<double> zero(128, 0.0);
  auto spec = log_power_bins(zero, 128.0, 1, 30);
  for (double b : spec.bins) CHECK(b == -12.0);
}

TEST_CASE("log_power_bins validates its band and epoch length") {
  std::vector<double> x(64, 0.0);
  CHECK_THROWS_AS(log_power_bins(x, 64.0, 0, 30), DataError);
  CHECK_THROWS_AS(log_power_bins(x, 64.0, 30, 30), DataError);
  CHECK_THROWS_AS(log_power_bins(x, 64.0, 1, 32), DataError);   // at Nyquist
  CHECK_THROWS_AS(log_power_bins(x, 128.0, 1, 30), DataError);  // not 1 s
  CHECK_NOTHROW(log_power_bins(x, 64.0, 1, 31));
}

TEST_CASE("zscore_rows yields population moments and zeroes constant rows") {
  Matrix m(3, 50);
  Rng rng(9);
  for (std::size_t c = 0; c < 50; ++c) {
    m(0, c) = 3.0 + 2.0 * rng.normal();
    m(1, c) = 7.5;  // constant
    m(2, c) = rng.uniform();
  }
  Matrix z = zscore_rows(m);
  for (std::size_t r : {0u, 2u}) {
    auto row = z.row(r);
    double mean = std::accumulate(row.begin(), row.end(), 0.0) / 50.0;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= 50.0;  // population variance, no Bessel correction
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double v : z.row(1)) CHECK(v == 0.0);

  Matrix tiny(1, 1);
  CHECK_THROWS_AS(zscore_rows(tiny), DataError);
}

TEST_CASE("cross_matrix equals the Pearson correlation matrix") {
  const std::size_t m = 5, k = 200;
  Matrix data(m, k);
  Rng rng(17);
  for (auto& v : data.data()) v = rng.normal();
  Matrix c = cross_matrix(zscore_rows(data));

  // brute-force Pearson from raw data
  Rng rng2(17);
  Matrix raw(m, k);
  for (auto& v : raw.data()) v = rng2.normal();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double mi = 0, mj = 0;
      for (std::size_t t = 0; t < k; ++t) {
        mi += raw(i, t);
        mj += raw(j, t);
      }
      mi /= k;
      mj /= k;
      double num = 0, di = 0, dj = 0;
      for (std::size_t t = 0; t < k; ++t) {
        num += (raw(i, t) - mi) * (raw(j, t) - mj);
        di += (raw(i, t) - mi) * (raw(i, t) - mi);
        dj += (raw(j, t) - mj) * (raw(j, t) - mj);
      }
      const double want = num / std::sqrt(di * dj);
      CHECK(c(i, j) == doctest::Approx(want).epsilon(1e-10));
      CHECK(c(i, j) == doctest::Approx(c(j, i)).epsilon(1e-15));
    }
    CHECK(c(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cross_matrix keeps constant rows as zero rows") {
  Matrix data(3, 40);
  Rng rng(4);
  for (auto& v : data.data()) v = rng.normal();
  for (std::size_t t = 0; t < 40; ++t) data(1, t) = -2.0;
  Matrix c = cross_matrix(zscore_rows(data));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(c(1, j) == 0.0);
    CHECK(c(j, 1) == 0.0);
  }
}

TEST_CASE("sym_eigen recovers a planted spectrum") {
  // Build A = Q diag(w) Q^T from a random orthogonal Q (Gram-Schmidt), then
  // check the solver returns exactly the planted eigenvalues.
  const std::size_t n = 5;
  std::vector<double> w{6.0, 2.5, 1.0, 0.25, -1.5};
  Rng rng(33);
  Matrix q(n, n);
  for (auto& v : q.data()) v = rng.normal();
  for (std::size_t j = 0; j < n; ++j) {      // orthonormalize columns
    for (std::size_t p = 0; p < j; ++p) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, p);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, p);
    }
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    REQUIRE(norm > 1e-8);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * w[k] * q(j, k);
      a(i, j) = s;
    }

  auto res = sym_eigen(a);
  REQUIRE(res.values.size() == n);
  std::vector<double> sorted_w = w;
  std::sort(sorted_w.rbegin(), sorted_w.rend());
  for (std::size_t i = 0; i < n; ++i)
    CHECK(res.values[i] == doctest::Approx(sorted_w[i]).epsilon(1e-10));

  // matching eigenvectors, up to sign: A v = lambda v
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double av = 0;
      for (std::size_t k = 0; k < n; ++k) av += a(i, k) * res.vectors(k, j);
      CHECK(std::abs(av - res.values[j] * res.vectors(i, j)) < 1e-9 * frob(a));
    }
  }

  // eigenvalues-only entry point agrees with the full decomposition
  auto vals = sym_eigenvalues(a);
  REQUIRE(vals.size() == n);
  for (std::size_t i = 0; i < n; ++i) CHECK(vals[i] == res.values[i]);
}

TEST_CASE("sym_eigen handles trivial shapes and known closed forms") {
  Matrix one(1, 1);
  one(0, 0) = -3.5;
  auto v1 = sym_eigenvalues(one);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == -3.5);

  Matrix two(2, 2);
  two(0, 0) = 2.0;
  two(0, 1) = two(1, 0) = 1.0;
  two(1, 1) = 2.0;
  auto v2 = sym_eigenvalues(two);
  CHECK(v2[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(v2[1] == doctest::Approx(1.0).epsilon(1e-12));

  Matrix diag(4, 4);
  for (auto& v : diag.data()) v = 0.0;
  diag(0, 0) = 0.5;
  diag(1, 1) = 4.0;
  diag(2, 2) = -1.0;
  diag(3, 3) = 2.0;
  auto vd = sym_eigenvalues(diag);
  CHECK(vd == std::vector<double>{4.0, 2.0, 0.5, -1.0});
}

TEST_CASE("eigendecomposition invariants on random correlation matrices") {
  Rng rng(71);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t m = 2 + rng.index(14);
    Matrix data(m, 80);
    for (auto& v : data.data()) v = rng.normal();
    Matrix c = cross_matrix(zscore_rows(std::move(data)));
    auto res = sym_eigen(c);

    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += c(i, i);
    double sum = std::accumulate(res.values.begin(), res.values.end(), 0.0);
    CHECK(std::abs(sum - trace) < 1e-8);

    for (std::size_t i = 1; i < m; ++i) CHECK(res.values[i - 1] >= res.values[i]);

    // reconstruction: V diag(w) V^T == C
    const double na = frob(c);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < m; ++k)
          s += res.vectors(i, k) * res.values[k] * res.vectors(j, k);
        CHECK(std::abs(s - c(i, j)) < 1e-8 * std::max(1.0, na));
      }
  }
}

TEST_CASE("feature layout dimensions and names") {
  for (std::size_t m : {1u, 4u, 16u}) {
    FeatureLayout lay;
    lay.m = m;
    CHECK(lay.freq_power_size() == m * 47);
    CHECK(lay.freq_eigs_size() == m);
    CHECK(lay.time_corr_size() == m * (m - 1) / 2);
    CHECK(lay.time_eigs_size() == m);
    CHECK(lay.total() == m * 47 + m + m * (m - 1) / 2 + m);
    auto names = lay.names();
    CHECK(names.size() == lay.total());
  }

  FeatureLayout l16;
  l16.m = 16;
  CHECK(l16.total() == 904);
  auto names = l16.names();
  CHECK(names[0] == "ch00_pow_1hz");
  CHECK(names[46] == "ch00_pow_47hz");
  CHECK(names[47] == "ch01_pow_1hz");
  CHECK(names[l16.freq_eigs_offset()] == "freq_eig_00");
  CHECK(names[l16.time_corr_offset()] == "corr_00_01");
  CHECK(names[l16.time_corr_offset() + 1] == "corr_00_02");
  CHECK(names.back() == "time_eig_15");

  FeatureLayout l1;
  l1.m = 1;
  CHECK(l1.total() == 49);
  FeatureLayout l4;
  l4.m = 4;
  CHECK(l4.total() == 202);
}

TEST_CASE("extract_features emits raw log bins and consistent eigen blocks") {
  auto e = noise_epoch(6, 400.0, 12);
  std::vector<int> sel{4, 0, 2};
  auto fv = extract_features(e, sel);
  REQUIRE(fv.values.size() == fv.layout.total());
  CHECK(fv.layout.m == 3);

  // the freq_power block is the unnormalized per-channel spectrum
  for (std::size_t i = 0; i < sel.size(); ++i) {
    auto spec = log_power_bins(e.samples.row(static_cast<std::size_t>(sel[i])),
                               400.0, 1, 47);
    for (std::size_t k = 0; k < 47; ++k)
      CHECK(fv.freq_power()[i * 47 + k] == spec.bins[k]);
  }

  // eigen blocks descend and sum to the trace of a correlation matrix (= m)
  auto fe = fv.freq_eigs();
  auto te = fv.time_eigs();
  CHECK(std::abs(std::accumulate(fe.begin(), fe.end(), 0.0) - 3.0) < 1e-8);
  CHECK(std::abs(std::accumulate(te.begin(), te.end(), 0.0) - 3.0) < 1e-8);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(fe[i - 1] >= fe[i]);
    CHECK(te[i - 1] >= te[i]);
  }
  for (double v : fv.time_corr()) CHECK(std::abs(v) <= 1.0 + 1e-12);

  // determinism
  auto fv2 = extract_features(e, sel);
  CHECK(fv2.values == fv.values);
}

TEST_CASE("extract_features m=1 gives the degenerate blocks") {
  auto e = noise_epoch(2, 400.0, 5);
  std::vector<int> sel{1};
  auto fv = extract_features(e, sel);
  CHECK(fv.values.size() == 49);
  CHECK(fv.time_corr().size() == 0);
  CHECK(fv.freq_eigs()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fv.time_eigs()[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("extract_features respects channel order and permutation") {
  auto e = noise_epoch(5, 400.0, 8);
  std::vector<int> ab{1, 3};
  std::vector<int> ba{3, 1};
  auto f_ab = extract_features(e, ab);
  auto f_ba = extract_features(e, ba);

  // power blocks swap with the channel order
  for (std::size_t k = 0; k < 47; ++k) {
    CHECK(f_ab.freq_power()[k] == f_ba.freq_power()[47 + k]);
    CHECK(f_ab.freq_power()[47 + k] == f_ba.freq_power()[k]);
  }
  // correlation is symmetric, eigenvalues are permutation-invariant
  CHECK(f_ab.time_corr()[0] == doctest::Approx(f_ba.time_corr()[0]).epsilon(1e-12));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(f_ab.freq_eigs()[i] == doctest::Approx(f_ba.freq_eigs()[i]).epsilon(1e-9));
    CHECK(f_ab.time_eigs()[i] == doctest::Approx(f_ba.time_eigs()[i]).epsilon(1e-9));
  }
}

TEST_CASE("extract_features is scale-covariant in the documented way") {
  auto e = noise_epoch(4, 400.0, 19);
  std::vector<int> sel{0, 1, 2, 3};
  auto base = extract_features(e, sel);

  const double c = 8.0;
  dataset::Epoch scaled = e;
  for (auto& v : scaled.samples.data()) v *= c;
  auto fv = extract_features(scaled, sel);

  // log bins shift by log10(c); the normalized blocks stay put
  for (std::size_t i = 0; i < base.freq_power().size(); ++i)
    CHECK(fv.freq_power()[i] ==
          doctest::Approx(base.freq_power()[i] + std::log10(c)).epsilon(1e-9));
  for (std::size_t i = 0; i < base.time_corr().size(); ++i)
    CHECK(fv.time_corr()[i] == doctest::Approx(base.time_corr()[i]).epsilon(1e-9));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(fv.freq_eigs()[i] == doctest::Approx(base.freq_eigs()[i]).epsilon(1e-9));
    CHECK(fv.time_eigs()[i] == doctest::Approx(base.time_eigs()[i]).epsilon(1e-9));
  }
}

TEST_CASE("extract_features rejects bad channel selections") {
  auto e = noise_epoch(4, 400.0, 3);
  CHECK_THROWS_AS(extract_features(e, std::vector<int>{}), DataError);
  CHECK_THROWS_AS(extract_features(e, std::vector<int>{0, 0}), DataError);
  CHECK_THROWS_AS(extract_features(e, std::vector<int>{0, 4}), DataError);
  CHECK_THROWS_AS(extract_features(e, std::vector<int>{-1}), DataError);
}

TEST_CASE("extract_features works on non-400 Hz epochs") {
  // frequency path runs on the native grid, time path goes through the
  // resampler; both must come out finite and correctly sized
  auto e = noise_epoch(3, 256.0, 44);
  std::vector<int> sel{0, 1, 2};
  auto fv = extract_features(e, sel);
  CHECK(fv.values.size() == fv.layout.total());
  for (double v : fv.values) CHECK(std::isfinite(v));
}
