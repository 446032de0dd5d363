// fft.hpp -- real/complex FFT frontend (FFTW3 behind a plan cache).
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ambise::fft {

/// n-point forward real FFT. x is zero-padded (or truncated) to n.
/// Returns the n/2+1 non-redundant bins, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n);

/// Inverse of rfft: n/2+1 bins back to n real samples, scaled by 1/n so
/// irfft(rfft(x, n), n) == x.
std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n);

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

}  // namespace ambise::fft
