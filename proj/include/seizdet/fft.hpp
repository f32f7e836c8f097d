#pragma once

#include <complex>
#include <span>
#include <vector>

namespace seizdet::fft {

/// Forward DFT of a real signal, full complex spectrum of the same length.
/// X[k] = sum_t x[t] * exp(-2*pi*i*k*t/n).
std::vector<std::complex<double>> forward(std::span<const double> x);

/// Inverse DFT (1/n convention), real part of the result.
std::vector<double> inverse_real(std::span<const std::complex<double>> spectrum);

}  // namespace seizdet::fft
