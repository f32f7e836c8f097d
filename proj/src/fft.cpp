#include "seizdet/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace seizdet::fft {

namespace {

// FFTW plan creation is not thread-safe; execution through a plan's own
// buffers is. Each thread keeps its own plans and buffers per size, and only
// plan creation takes the global lock.
std::mutex g_plan_mutex;

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t n = 0;

  ~PlanPair() {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

PlanPair& plans_for(std::size_t n) {
  thread_local std::map<std::size_t, PlanPair> cache;
  PlanPair& p = cache[n];
  if (p.n != n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    p.in = fftw_alloc_complex(n);
    p.out = fftw_alloc_complex(n);
    p.fwd = fftw_plan_dft_1d(static_cast<int>(n), p.in, p.out, FFTW_FORWARD,
                             FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(static_cast<int>(n), p.in, p.out, FFTW_BACKWARD,
                             FFTW_ESTIMATE);
    p.n = n;
  }
  return p;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> result(n);
  if (n == 0) return result;
  PlanPair& p = plans_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.in[i][0] = x[i];
    p.in[i][1] = 0.0;
  }
  fftw_execute(p.fwd);
  for (std::size_t i = 0; i < n; ++i)
    result[i] = {p.out[i][0], p.out[i][1]};
  return result;
}

std::vector<double> inverse_real(std::span<const std::complex<double>> spectrum) {
  const std::size_t n = spectrum.size();
  std::vector<double> result(n);
  if (n == 0) return result;
  PlanPair& p = plans_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.in[i][0] = spectrum[i].real();
    p.in[i][1] = spectrum[i].imag();
  }
  fftw_execute(p.bwd);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = p.out[i][0] * scale;
  return result;
}

}  // namespace seizdet::fft
