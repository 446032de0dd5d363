// stft.hpp -- short-time Fourier analysis/synthesis with exact inversion.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ambise/audio.hpp"

namespace ambise {

enum class Window { rectangular, hann, sqrt_hann };

/// Analysis/synthesis configuration. The same window is applied on both
/// sides; inversion divides by the per-sample window-power coverage, so any
/// config whose steady-state coverage stays clear of zero reconstructs
/// exactly. That condition is evaluated numerically at construction.
class StftConfig {
public:
    StftConfig(std::size_t fft_size, std::size_t hop_size, Window window);

    std::size_t fft_size() const { return fft_size_; }
    std::size_t hop_size() const { return hop_size_; }
    Window window() const { return window_; }
    const std::vector<double>& window_coefficients() const { return coeffs_; }

    /// True when analysis+synthesis overlap-add covers every sample with
    /// non-vanishing window power (the constant-overlap-add check).
    bool invertible() const { return invertible_; }

private:
    std::size_t fft_size_;
    std::size_t hop_size_;
    Window window_;
    std::vector<double> coeffs_;
    bool invertible_;
};

/// Complex time-frequency matrix, frames x (fft_size/2 + 1) bins, plus the
/// framing metadata needed to invert back to the exact source length.
class Spectrogram {
public:
    Spectrogram(std::size_t num_frames, StftConfig config, int source_rate_hz,
                std::size_t source_length);

    std::size_t num_frames() const { return num_frames_; }
    std::size_t num_bins() const { return num_bins_; }

    std::complex<double>& at(std::size_t frame, std::size_t bin) {
        return bins_[frame * num_bins_ + bin];
    }
    const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
        return bins_[frame * num_bins_ + bin];
    }

    std::vector<std::complex<double>>& data() { return bins_; }
    const std::vector<std::complex<double>>& data() const { return bins_; }

    const StftConfig& config() const { return config_; }
    int source_rate_hz() const { return source_rate_hz_; }
    std::size_t source_length() const { return source_length_; }

    /// Bin center frequency in Hz.
    double bin_hz(std::size_t bin) const {
        return static_cast<double>(bin) * source_rate_hz_ / static_cast<double>(config_.fft_size());
    }

private:
    std::size_t num_frames_;
    std::size_t num_bins_;
    std::vector<std::complex<double>> bins_;
    StftConfig config_;
    int source_rate_hz_;
    std::size_t source_length_;
};

/// Forward transform. The signal is reflect-padded by fft_size/2 on the left
/// (frame centers align with signal samples) and on the right far enough
/// that ceil((len + fft_size/2) / hop) frames fit.
Spectrogram stft(const AudioBuffer& signal, const StftConfig& config);

/// Windowed overlap-add inversion, normalized by per-sample window power and
/// cropped back to source_length. Throws if the config is not invertible.
AudioBuffer istft(const Spectrogram& spec);

}  // namespace ambise
