#include "ambise/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ambise/fft.hpp"

namespace ambise {

AudioBuffer fft_convolve(const AudioBuffer& a, std::span<const double> taps) {
    validate(a, "fft_convolve signal");
    if (taps.empty()) throw std::invalid_argument("fft_convolve: empty taps");
    for (double t : taps)
        if (!std::isfinite(t)) throw std::invalid_argument("fft_convolve: non-finite taps");

    const std::size_t out_len = a.size() + taps.size() - 1;
    const std::size_t n = fft::next_pow2(out_len);
    auto fa = fft::rfft(a.samples, n);
    auto fb = fft::rfft(taps, n);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    auto full = fft::irfft(fa, n);

    AudioBuffer out;
    out.sample_rate_hz = a.sample_rate_hz;
    out.samples.assign(full.begin(), full.begin() + static_cast<long long>(out_len));
    return out;
}

namespace {

double bessel_i0(double x) {
    // Series expansion, converges quickly for the beta values used here.
    double sum = 1.0, term = 1.0;
    const double half_x = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half_x / k) * (half_x / k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& signal, int target_rate_hz) {
    validate(signal, "resample input");
    if (target_rate_hz <= 0)
        throw std::invalid_argument("resample: target rate must be positive");
    if (target_rate_hz == signal.sample_rate_hz) return signal;

    const long long src = signal.sample_rate_hz;
    const long long dst = target_rate_hz;
    const long long g = std::gcd(src, dst);
    const long long up = dst / g;    // L
    const long long down = src / g;  // M
    if (up > 4096)
        throw std::invalid_argument("resample: rate ratio too fine-grained");

    // Anti-alias / interpolation kernel: Kaiser-windowed sinc, cutoff at the
    // lower Nyquist, ~32 sinc lobes per side of support.
    const double ratio = static_cast<double>(dst) / static_cast<double>(src);
    const double cutoff = 0.5 * std::min(1.0, ratio);  // cycles per input sample
    const double half_width = 16.0 / cutoff;           // input samples
    const double beta = 10.0;
    const double i0_beta = bessel_i0(beta);
    const int max_taps = 2 * static_cast<int>(std::ceil(half_width)) + 1;

    // One filter per output phase; each row normalized to unit DC gain.
    std::vector<std::vector<double>> phase_taps(static_cast<std::size_t>(up));
    std::vector<long long> phase_first(static_cast<std::size_t>(up));
    for (long long p = 0; p < up; ++p) {
        const double t = static_cast<double>(p * down) / static_cast<double>(up);
        const long long first = static_cast<long long>(std::ceil(t - half_width));
        auto& taps = phase_taps[static_cast<std::size_t>(p)];
        taps.resize(static_cast<std::size_t>(max_taps), 0.0);
        phase_first[static_cast<std::size_t>(p)] = first;
        double sum = 0.0;
        for (int k = 0; k < max_taps; ++k) {
            const double dt = t - static_cast<double>(first + k);
            if (std::abs(dt) > half_width) continue;
            const double u = dt / half_width;
            const double window = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0_beta;
            taps[static_cast<std::size_t>(k)] = 2.0 * cutoff * sinc(2.0 * cutoff * dt) * window;
            sum += taps[static_cast<std::size_t>(k)];
        }
        for (double& v : taps) v /= sum;
    }

    const std::size_t in_len = signal.size();
    const std::size_t out_len =
        static_cast<std::size_t>(std::llround(static_cast<double>(in_len) * ratio));

    // Reflect-extend so edge output samples see full kernel support.
    auto sample_at = [&](long long i) -> double {
        if (in_len == 1) return signal.samples[0];
        const long long period = 2 * (static_cast<long long>(in_len) - 1);
        long long m = i % period;
        if (m < 0) m += period;
        if (m >= static_cast<long long>(in_len)) m = period - m;
        return signal.samples[static_cast<std::size_t>(m)];
    };

    AudioBuffer out;
    out.sample_rate_hz = target_rate_hz;
    out.samples.resize(out_len, 0.0);
    for (std::size_t j = 0; j < out_len; ++j) {
        const long long p = static_cast<long long>(j) % up;
        const long long base =
            (static_cast<long long>(j) / up) * down + phase_first[static_cast<std::size_t>(p)];
        const auto& taps = phase_taps[static_cast<std::size_t>(p)];
        double acc = 0.0;
        for (int k = 0; k < max_taps; ++k)
            acc += taps[static_cast<std::size_t>(k)] * sample_at(base + k);
        out.samples[j] = acc;
    }
    return out;
}

}  // namespace ambise
