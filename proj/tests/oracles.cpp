#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<double> direct_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

long long xcorr_peak_lag(const std::vector<double>& a, const std::vector<double>& b,
                         long long max_lag) {
    long long best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    const long long n = static_cast<long long>(a.size());
    for (long long lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (long long t = 0; t < n; ++t) {
            const long long u = t + lag;
            if (u < 0 || u >= static_cast<long long>(b.size())) continue;
            acc += a[static_cast<std::size_t>(t)] * b[static_cast<std::size_t>(u)];
        }
        if (acc > best_val) {
            best_val = acc;
            best = lag;
        }
    }
    return best;
}

long long ncc_argmax(const std::vector<double>& ref, const std::vector<double>& channel,
                     std::size_t window, long long max_lag) {
    std::vector<double> curve(static_cast<std::size_t>(2 * max_lag + 1), 0.0);
    for (std::size_t start = 0; start + window <= ref.size(); start += window) {
        double e_ref = 0.0;
        for (std::size_t i = start; i < start + window; ++i) e_ref += ref[i] * ref[i];
        if (e_ref <= 0.0) continue;
        for (long long lag = -max_lag; lag <= max_lag; ++lag) {
            double dot = 0.0, e_ch = 0.0;
            for (std::size_t i = start; i < start + window; ++i) {
                const long long j = static_cast<long long>(i) + lag;
                if (j < 0 || j >= static_cast<long long>(channel.size())) continue;
                dot += ref[i] * channel[static_cast<std::size_t>(j)];
                e_ch += channel[static_cast<std::size_t>(j)] * channel[static_cast<std::size_t>(j)];
            }
            if (e_ch <= 0.0) continue;
            curve[static_cast<std::size_t>(lag + max_lag)] += dot / std::sqrt(e_ref * e_ch);
        }
    }
    const auto it = std::max_element(curve.begin(), curve.end());
    return std::distance(curve.begin(), it) - max_lag;
}

ambise::Direction steered_power_doa(const ambise::BFormatScene& scene, double w_gain,
                                    double grid_deg) {
    // Steered cardioid power is a quadratic form in the direction cosines;
    // accumulate the channel correlation matrix once, then scan the grid.
    const std::size_t n = scene.size();
    const double* w = scene.w.samples.data();
    const double* x = scene.x.samples.data();
    const double* y = scene.y.samples.data();
    const double* z = scene.z.samples.data();
    double pw = 0, px = 0, py = 0, pz = 0;
    double cwx = 0, cwy = 0, cwz = 0, cxy = 0, cxz = 0, cyz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pw += w[i] * w[i];
        px += x[i] * x[i];
        py += y[i] * y[i];
        pz += z[i] * z[i];
        cwx += w[i] * x[i];
        cwy += w[i] * y[i];
        cwz += w[i] * z[i];
        cxy += x[i] * y[i];
        cxz += x[i] * z[i];
        cyz += y[i] * z[i];
    }

    ambise::Direction best{0.0, 0.0};
    double best_power = -std::numeric_limits<double>::infinity();
    for (double el = -90.0; el <= 90.0; el += grid_deg) {
        for (double az = -180.0; az < 180.0; az += grid_deg) {
            const double a = az * kPi / 180.0;
            const double e = el * kPi / 180.0;
            const double ux = std::cos(a) * std::cos(e);
            const double uy = std::sin(a) * std::cos(e);
            const double uz = std::sin(e);
            // y(t) = 0.5 * w/w_gain + 0.5 * (ux X + uy Y + uz Z)
            const double g = 0.5 / w_gain;
            const double power =
                g * g * pw + g * (ux * cwx + uy * cwy + uz * cwz) +
                0.25 * (ux * ux * px + uy * uy * py + uz * uz * pz + 2 * ux * uy * cxy +
                        2 * ux * uz * cxz + 2 * uy * uz * cyz);
            if (power > best_power) {
                best_power = power;
                best = {az, el};
            }
        }
    }
    return best;
}

namespace {

// ---- reference intelligibility pipeline -----------------------------------

struct DftTables {
    // cosine/sine of 2*pi*k*n/512 for k = 0..256, n = 0..255
    std::vector<double> cos_t, sin_t;
    static constexpr std::size_t kFrame = 256;
    static constexpr std::size_t kNfft = 512;
    static constexpr std::size_t kBins = 257;

    DftTables() {
        cos_t.resize(kBins * kFrame);
        sin_t.resize(kBins * kFrame);
        for (std::size_t k = 0; k < kBins; ++k)
            for (std::size_t t = 0; t < kFrame; ++t) {
                const double ang = 2.0 * kPi * static_cast<double>(k * t) / kNfft;
                cos_t[k * kFrame + t] = std::cos(ang);
                sin_t[k * kFrame + t] = std::sin(ang);
            }
    }
};

std::vector<double> hanning_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i + 1) /
                                     static_cast<double>(n + 1)));
    return w;
}

}  // namespace

double reference_stoi(const ambise::AudioBuffer& clean, const ambise::AudioBuffer& degraded) {
    if (clean.sample_rate_hz != 10000 || degraded.sample_rate_hz != 10000)
        throw std::invalid_argument("reference_stoi: inputs must be at 10 kHz");
    if (clean.size() != degraded.size())
        throw std::invalid_argument("reference_stoi: inputs must share length");

    constexpr std::size_t frame_len = 256;
    constexpr std::size_t hop = 128;
    constexpr std::size_t nfft = 512;
    constexpr std::size_t n_bins = nfft / 2 + 1;
    constexpr std::size_t n_bands = 15;
    constexpr std::size_t seg_len = 30;
    const auto window = hanning_window(frame_len);

    // 1. drop frames more than 40 dB below the loudest clean frame
    const std::vector<double>& x0 = clean.samples;
    const std::vector<double>& y0 = degraded.samples;
    std::vector<double> frame_db;
    for (std::size_t s = 0; s + frame_len <= x0.size(); s += hop) {
        double e = 0.0;
        for (std::size_t i = 0; i < frame_len; ++i) {
            const double v = x0[s + i] * window[i];
            e += v * v;
        }
        frame_db.push_back(e > 0 ? 10.0 * std::log10(e) : -1e30);
    }
    const double peak_db = *std::max_element(frame_db.begin(), frame_db.end());
    std::vector<double> x, y;
    std::size_t kept = 0;
    x.assign(x0.size(), 0.0);
    y.assign(y0.size(), 0.0);
    std::size_t end = 0;
    for (std::size_t j = 0; j < frame_db.size(); ++j) {
        if (frame_db[j] <= peak_db - 40.0) continue;
        const std::size_t src = j * hop;
        const std::size_t dst = kept * hop;
        for (std::size_t i = 0; i < frame_len; ++i) {
            x[dst + i] += x0[src + i] * window[i];
            y[dst + i] += y0[src + i] * window[i];
        }
        end = dst + frame_len;
        ++kept;
    }
    x.resize(end);
    y.resize(end);

    const std::size_t n_frames = end >= frame_len ? (end - frame_len) / hop + 1 : 0;
    if (n_frames < seg_len)
        throw std::invalid_argument("reference_stoi: too few active frames");

    // 2. band edges by containment of the bin center frequency
    static const DftTables tables;
    std::vector<std::vector<std::size_t>> band_bins(n_bands);
    for (std::size_t k = 0; k < n_bands; ++k) {
        const double cf = 150.0 * std::pow(2.0, static_cast<double>(k) / 3.0);
        const double lo = cf * std::pow(2.0, -1.0 / 6.0);
        const double hi = cf * std::pow(2.0, 1.0 / 6.0);
        for (std::size_t b = 0; b < n_bins; ++b) {
            const double hz = static_cast<double>(b) * 10000.0 / nfft;
            if (hz >= lo && hz < hi) band_bins[k].push_back(b);
        }
    }

    // 3. band envelopes via direct DFT
    std::vector<std::vector<double>> ex(n_bands, std::vector<double>(n_frames));
    std::vector<std::vector<double>> ey(n_bands, std::vector<double>(n_frames));
    std::vector<double> fx(frame_len), fy(frame_len);
    for (std::size_t m = 0; m < n_frames; ++m) {
        for (std::size_t i = 0; i < frame_len; ++i) {
            fx[i] = x[m * hop + i] * window[i];
            fy[i] = y[m * hop + i] * window[i];
        }
        for (std::size_t k = 0; k < n_bands; ++k) {
            double sum_x = 0.0, sum_y = 0.0;
            for (std::size_t b : band_bins[k]) {
                double re_x = 0, im_x = 0, re_y = 0, im_y = 0;
                const double* ct = tables.cos_t.data() + b * frame_len;
                const double* st = tables.sin_t.data() + b * frame_len;
                for (std::size_t t = 0; t < frame_len; ++t) {
                    re_x += fx[t] * ct[t];
                    im_x -= fx[t] * st[t];
                    re_y += fy[t] * ct[t];
                    im_y -= fy[t] * st[t];
                }
                sum_x += re_x * re_x + im_x * im_x;
                sum_y += re_y * re_y + im_y * im_y;
            }
            ex[k][m] = std::sqrt(sum_x);
            ey[k][m] = std::sqrt(sum_y);
        }
    }

    // 4. clipped, normalized short-time correlations
    const double clip = 1.0 + std::pow(10.0, 15.0 / 20.0);
    double total = 0.0;
    std::size_t cells = 0;
    for (std::size_t m = seg_len - 1; m < n_frames; ++m) {
        for (std::size_t k = 0; k < n_bands; ++k) {
            double exx = 0.0, eyy = 0.0;
            for (std::size_t i = 0; i < seg_len; ++i) {
                const double a = ex[k][m - seg_len + 1 + i];
                const double b = ey[k][m - seg_len + 1 + i];
                exx += a * a;
                eyy += b * b;
            }
            const double alpha = eyy > 0.0 ? std::sqrt(exx / eyy) : 0.0;
            double sx = 0.0, sy = 0.0;
            std::vector<double> xi(seg_len), yi(seg_len);
            for (std::size_t i = 0; i < seg_len; ++i) {
                xi[i] = ex[k][m - seg_len + 1 + i];
                yi[i] = std::min(alpha * ey[k][m - seg_len + 1 + i], clip * xi[i]);
                sx += xi[i];
                sy += yi[i];
            }
            sx /= seg_len;
            sy /= seg_len;
            double vxx = 0.0, vyy = 0.0, vxy = 0.0;
            for (std::size_t i = 0; i < seg_len; ++i) {
                vxx += (xi[i] - sx) * (xi[i] - sx);
                vyy += (yi[i] - sy) * (yi[i] - sy);
                vxy += (xi[i] - sx) * (yi[i] - sy);
            }
            if (vxx > 0.0 && vyy > 0.0) total += vxy / std::sqrt(vxx * vyy);
            ++cells;
        }
    }
    return total / static_cast<double>(cells);
}

}  // namespace oracle
