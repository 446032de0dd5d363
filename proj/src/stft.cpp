#include "ambise/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ambise/fft.hpp"

namespace ambise {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> coeffs(n, 1.0);
    if (w == Window::rectangular) return coeffs;
    for (std::size_t i = 0; i < n; ++i) {
        // Periodic (DFT-even) Hann, the variant that overlap-adds to a
        // constant at 50% hop.
        double h = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(n));
        coeffs[i] = (w == Window::hann) ? h : std::sqrt(h);
    }
    return coeffs;
}

// Mirror index s into [0, len) reflecting about both endpoints without
// duplicating them (symmetric extension).
std::size_t reflect_index(long long s, std::size_t len) {
    if (len == 1) return 0;
    const long long period = 2 * (static_cast<long long>(len) - 1);
    long long m = s % period;
    if (m < 0) m += period;
    if (m >= static_cast<long long>(len)) m = period - m;
    return static_cast<std::size_t>(m);
}

}  // namespace

StftConfig::StftConfig(std::size_t fft_size, std::size_t hop_size, Window window)
    : fft_size_(fft_size), hop_size_(hop_size), window_(window) {
    if (!is_pow2(fft_size_))
        throw std::invalid_argument("StftConfig: fft_size must be a power of two");
    if (hop_size_ == 0 || hop_size_ > fft_size_)
        throw std::invalid_argument("StftConfig: hop_size must be in [1, fft_size]");
    coeffs_ = make_window(window_, fft_size_);

    // Steady-state overlap-add of w^2: every interior sample must keep
    // non-vanishing coverage for the normalized inversion to be exact.
    std::vector<double> coverage(3 * fft_size_, 0.0);
    for (std::size_t start = 0; start + fft_size_ <= coverage.size(); start += hop_size_)
        for (std::size_t i = 0; i < fft_size_; ++i)
            coverage[start + i] += coeffs_[i] * coeffs_[i];
    double lo = coverage[fft_size_];
    for (std::size_t i = fft_size_; i < 2 * fft_size_; ++i) lo = std::min(lo, coverage[i]);
    invertible_ = lo > 1e-8;
}

Spectrogram::Spectrogram(std::size_t num_frames, StftConfig config, int source_rate_hz,
                         std::size_t source_length)
    : num_frames_(num_frames),
      num_bins_(config.fft_size() / 2 + 1),
      bins_(num_frames * (config.fft_size() / 2 + 1)),
      config_(std::move(config)),
      source_rate_hz_(source_rate_hz),
      source_length_(source_length) {}

Spectrogram stft(const AudioBuffer& signal, const StftConfig& config) {
    validate(signal, "stft input");
    const std::size_t n = config.fft_size();
    const std::size_t hop = config.hop_size();
    const std::size_t half = n / 2;
    const std::size_t len = signal.size();
    const std::size_t frames = (len + half + hop - 1) / hop;

    Spectrogram spec(frames, config, signal.sample_rate_hz, len);
    const auto& w = config.window_coefficients();
    std::vector<double> frame(n);
    for (std::size_t f = 0; f < frames; ++f) {
        const long long start = static_cast<long long>(f * hop) - static_cast<long long>(half);
        for (std::size_t i = 0; i < n; ++i)
            frame[i] = w[i] * signal.samples[reflect_index(start + static_cast<long long>(i), len)];
        auto bins = fft::rfft(frame, n);
        std::copy(bins.begin(), bins.end(), spec.data().begin() + static_cast<long long>(f * spec.num_bins()));
    }
    return spec;
}

AudioBuffer istft(const Spectrogram& spec) {
    const StftConfig& config = spec.config();
    if (!config.invertible())
        throw std::invalid_argument("istft: window/hop pair fails the overlap-add check");
    const std::size_t n = config.fft_size();
    const std::size_t hop = config.hop_size();
    const std::size_t half = n / 2;
    const std::size_t len = spec.source_length();
    const std::size_t frames = spec.num_frames();

    const std::size_t padded = (frames == 0) ? 0 : (frames - 1) * hop + n;
    std::vector<double> acc(padded, 0.0);
    std::vector<double> coverage(padded, 0.0);
    const auto& w = config.window_coefficients();
    std::vector<std::complex<double>> bins(spec.num_bins());
    for (std::size_t f = 0; f < frames; ++f) {
        std::copy(spec.data().begin() + static_cast<long long>(f * spec.num_bins()),
                  spec.data().begin() + static_cast<long long>((f + 1) * spec.num_bins()),
                  bins.begin());
        auto frame = fft::irfft(bins, n);
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < n; ++i) {
            acc[start + i] += w[i] * frame[i];
            coverage[start + i] += w[i] * w[i];
        }
    }

    AudioBuffer out;
    out.sample_rate_hz = spec.source_rate_hz();
    out.samples.resize(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        const std::size_t q = i + half;
        if (q < padded && coverage[q] > 1e-12) out.samples[i] = acc[q] / coverage[q];
    }
    return out;
}

}  // namespace ambise
