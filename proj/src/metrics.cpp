#include "ambise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ambise/dsp.hpp"
#include "ambise/fft.hpp"

namespace ambise {

namespace {

constexpr int kStoiRate = 10000;
constexpr std::size_t kFrame = 256;
constexpr std::size_t kHop = 128;
constexpr std::size_t kNfft = 512;
constexpr std::size_t kNumBands = 15;
constexpr double kLowestBandHz = 150.0;
constexpr std::size_t kSegment = 30;          // frames per short-time segment
constexpr double kDynRangeDb = 40.0;          // silent-frame threshold
constexpr double kBeta = -15.0;               // clip level, dB

// Symmetric Hann without zero endpoints.
std::vector<double> stoi_window() {
    std::vector<double> w(kFrame);
    for (std::size_t i = 0; i < kFrame; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) /
                                     static_cast<double>(kFrame + 1)));
    return w;
}

// Drops frames more than kDynRangeDb below the loudest clean frame, packing
// the survivors back with windowed 50% overlap-add.
void remove_silent_frames(const std::vector<double>& x, const std::vector<double>& y,
                          std::vector<double>& x_out, std::vector<double>& y_out) {
    const auto w = stoi_window();
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + kFrame <= x.size(); s += kHop) starts.push_back(s);
    if (starts.empty()) throw std::invalid_argument("stoi: signal shorter than one frame");

    std::vector<double> level(starts.size());
    double max_level = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < starts.size(); ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i < kFrame; ++i) {
            const double v = x[starts[j] + i] * w[i];
            e += v * v;
        }
        level[j] = e > 0.0 ? 10.0 * std::log10(e) : -std::numeric_limits<double>::infinity();
        max_level = std::max(max_level, level[j]);
    }
    if (!std::isfinite(max_level)) throw std::invalid_argument("stoi: clean signal is silent");

    std::size_t kept = 0;
    x_out.assign(x.size(), 0.0);
    y_out.assign(y.size(), 0.0);
    std::size_t out_end = 0;
    for (std::size_t j = 0; j < starts.size(); ++j) {
        if (level[j] <= max_level - kDynRangeDb) continue;
        const std::size_t out = kept * kHop;
        for (std::size_t i = 0; i < kFrame; ++i) {
            x_out[out + i] += x[starts[j] + i] * w[i];
            y_out[out + i] += y[starts[j] + i] * w[i];
        }
        out_end = out + kFrame;
        ++kept;
    }
    x_out.resize(out_end);
    y_out.resize(out_end);
}

// One-third-octave grouping: bin belongs to band k when its center frequency
// lies inside [cf*2^(-1/6), cf*2^(1/6)).
std::vector<std::vector<std::size_t>> third_octave_bins() {
    std::vector<std::vector<std::size_t>> bands(kNumBands);
    const std::size_t n_bins = kNfft / 2 + 1;
    for (std::size_t k = 0; k < kNumBands; ++k) {
        const double cf = kLowestBandHz * std::pow(2.0, static_cast<double>(k) / 3.0);
        const double lo = cf * std::pow(2.0, -1.0 / 6.0);
        const double hi = cf * std::pow(2.0, 1.0 / 6.0);
        for (std::size_t b = 0; b < n_bins; ++b) {
            const double hz = static_cast<double>(b) * kStoiRate / static_cast<double>(kNfft);
            if (hz >= lo && hz < hi) bands[k].push_back(b);
        }
    }
    return bands;
}

// Correlation of mean-removed, unit-norm vectors; 0 when either side has no
// variance.
double segment_correlation(const double* x, const double* y, std::size_t n) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

StoiScore stoi(const AudioBuffer& clean, const AudioBuffer& degraded) {
    validate(clean, "stoi clean");
    validate(degraded, "stoi degraded");
    if (clean.sample_rate_hz != degraded.sample_rate_hz)
        throw std::invalid_argument("stoi: sample rates differ");

    AudioBuffer x = clean;
    AudioBuffer y = degraded;
    const std::size_t common = std::min(x.size(), y.size());
    x.samples.resize(common);
    y.samples.resize(common);
    if (x.sample_rate_hz != kStoiRate) {
        x = resample(x, kStoiRate);
        y = resample(y, kStoiRate);
    }

    std::vector<double> xs, ys;
    remove_silent_frames(x.samples, y.samples, xs, ys);

    std::size_t frames = 0;
    if (xs.size() >= kFrame) frames = (xs.size() - kFrame) / kHop + 1;
    if (frames < kSegment)
        throw std::invalid_argument("stoi: fewer than 30 active frames");

    const auto w = stoi_window();
    const auto bands = third_octave_bins();
    std::vector<double> frame(kFrame);

    // Band envelope matrices, [band][frame].
    std::vector<std::vector<double>> bx(kNumBands, std::vector<double>(frames));
    std::vector<std::vector<double>> by(kNumBands, std::vector<double>(frames));
    for (std::size_t m = 0; m < frames; ++m) {
        const std::size_t start = m * kHop;
        for (int which = 0; which < 2; ++which) {
            const auto& src = which == 0 ? xs : ys;
            for (std::size_t i = 0; i < kFrame; ++i) frame[i] = src[start + i] * w[i];
            const auto bins = fft::rfft(frame, kNfft);
            for (std::size_t k = 0; k < kNumBands; ++k) {
                double e = 0.0;
                for (std::size_t b : bands[k]) e += std::norm(bins[b]);
                (which == 0 ? bx : by)[k][m] = std::sqrt(e);
            }
        }
    }

    const double clip = 1.0 + std::pow(10.0, -kBeta / 20.0);
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<double> y_clipped(kSegment);
    for (std::size_t m = kSegment - 1; m < frames; ++m) {
        const std::size_t seg = m - (kSegment - 1);
        for (std::size_t k = 0; k < kNumBands; ++k) {
            const double* xk = bx[k].data() + seg;
            const double* yk = by[k].data() + seg;
            double ex = 0.0, ey = 0.0;
            for (std::size_t i = 0; i < kSegment; ++i) {
                ex += xk[i] * xk[i];
                ey += yk[i] * yk[i];
            }
            const double alpha = ey > 0.0 ? std::sqrt(ex / ey) : 0.0;
            for (std::size_t i = 0; i < kSegment; ++i)
                y_clipped[i] = std::min(alpha * yk[i], clip * xk[i]);
            sum += segment_correlation(xk, y_clipped.data(), kSegment);
            ++count;
        }
    }
    return {sum / static_cast<double>(count)};
}

SpatialDeviation icld_icpd_deviation(const std::vector<Spectrogram>& before,
                                     const std::vector<Spectrogram>& after, double floor_dbfs) {
    if (before.size() != after.size() || before.empty())
        throw std::invalid_argument("icld_icpd_deviation: channel counts differ");
    const std::size_t channels = before.size();
    const std::size_t frames = before[0].num_frames();
    const std::size_t bins = before[0].num_bins();
    for (const auto& s : before)
        if (s.num_frames() != frames || s.num_bins() != bins)
            throw std::invalid_argument("icld_icpd_deviation: spectrogram shapes differ");
    for (const auto& s : after)
        if (s.num_frames() != frames || s.num_bins() != bins)
            throw std::invalid_argument("icld_icpd_deviation: spectrogram shapes differ");

    const double floor_lin = std::pow(10.0, floor_dbfs / 20.0);
    double icld_sq = 0.0, icpd_sq = 0.0;
    std::size_t active = 0;
    auto wrap_pi = [](double v) {
        while (v > std::numbers::pi) v -= 2.0 * std::numbers::pi;
        while (v <= -std::numbers::pi) v += 2.0 * std::numbers::pi;
        return v;
    };
    for (std::size_t i = 0; i < channels; ++i) {
        for (std::size_t j = i + 1; j < channels; ++j) {
            for (std::size_t f = 0; f < frames; ++f) {
                for (std::size_t b = 0; b < bins; ++b) {
                    const auto bi = before[i].at(f, b);
                    const auto bj = before[j].at(f, b);
                    const auto ai = after[i].at(f, b);
                    const auto aj = after[j].at(f, b);
                    if (std::abs(bi) <= floor_lin || std::abs(bj) <= floor_lin ||
                        std::abs(ai) <= floor_lin || std::abs(aj) <= floor_lin)
                        continue;
                    const double icld_in = 20.0 * std::log10(std::abs(bi) / std::abs(bj));
                    const double icld_out = 20.0 * std::log10(std::abs(ai) / std::abs(aj));
                    const double icpd_in = std::arg(bi) - std::arg(bj);
                    const double icpd_out = std::arg(ai) - std::arg(aj);
                    const double d_icld = icld_out - icld_in;
                    const double d_icpd = wrap_pi(icpd_out - icpd_in);
                    icld_sq += d_icld * d_icld;
                    icpd_sq += d_icpd * d_icpd;
                    ++active;
                }
            }
        }
    }
    if (active == 0) throw std::invalid_argument("icld_icpd_deviation: no active bins");

    SpatialDeviation dev;
    dev.icld_rms_db = std::sqrt(icld_sq / static_cast<double>(active));
    dev.icpd_rms_rad = std::sqrt(icpd_sq / static_cast<double>(active));
    dev.active_bin_count = active;
    return dev;
}

SpatialDeviation icld_icpd_deviation(const BFormatScene& before, const BFormatScene& after,
                                     const StftConfig& config, double floor_dbfs) {
    validate(before, "icld_icpd before");
    validate(after, "icld_icpd after");
    if (before.size() != after.size() || before.sample_rate_hz() != after.sample_rate_hz())
        throw std::invalid_argument("icld_icpd_deviation: scenes must share shape and rate");

    std::vector<Spectrogram> sb, sa;
    for (const AudioBuffer* ch : before.channels()) sb.push_back(stft(*ch, config));
    for (const AudioBuffer* ch : after.channels()) sa.push_back(stft(*ch, config));
    return icld_icpd_deviation(sb, sa, floor_dbfs);
}

}  // namespace ambise
