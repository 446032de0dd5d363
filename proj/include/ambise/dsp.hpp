// dsp.hpp -- convolution and rational resampling.
#pragma once

#include <span>
#include <vector>

#include "ambise/audio.hpp"

namespace ambise {

/// Full linear convolution via FFT; output length = len(a) + len(taps) - 1.
AudioBuffer fft_convolve(const AudioBuffer& a, std::span<const double> taps);

/// Windowed-sinc rational resampling. Output length = round(len * target/source).
/// Identity when the rates already match.
AudioBuffer resample(const AudioBuffer& signal, int target_rate_hz);

}  // namespace ambise
