#include "ambise/doa.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "ambise/fft.hpp"

namespace ambise {

DoaEstimate pseudo_intensity_doa(const BFormatScene& scene, const StftConfig& config,
                                 const FrequencyBand& band) {
    validate(scene, "pseudo_intensity_doa scene");
    const double nyquist = scene.sample_rate_hz() / 2.0;
    if (band.lo_hz < 0.0 || band.hi_hz <= band.lo_hz || band.hi_hz > nyquist)
        throw std::invalid_argument("pseudo_intensity_doa: band must lie within [0, Nyquist]");

    const Spectrogram sw = stft(scene.w, config);
    const Spectrogram sx = stft(scene.x, config);
    const Spectrogram sy = stft(scene.y, config);
    const Spectrogram sz = stft(scene.z, config);

    Vec3 intensity;
    double w_power = 0.0;
    for (std::size_t b = 0; b < sw.num_bins(); ++b) {
        const double hz = sw.bin_hz(b);
        if (hz < band.lo_hz || hz > band.hi_hz) continue;
        for (std::size_t f = 0; f < sw.num_frames(); ++f) {
            const std::complex<double> cw = std::conj(sw.at(f, b));
            intensity.x += (cw * sx.at(f, b)).real();
            intensity.y += (cw * sy.at(f, b)).real();
            intensity.z += (cw * sz.at(f, b)).real();
            w_power += std::norm(sw.at(f, b));
        }
    }

    const double norm = std::sqrt(intensity.x * intensity.x + intensity.y * intensity.y +
                                  intensity.z * intensity.z);
    if (norm <= 0.0 || w_power <= 0.0)
        throw std::runtime_error("pseudo_intensity_doa: no estimate, scene carries no intensity");

    DoaEstimate est;
    est.direction = cartesian_to_spherical(intensity);
    est.confidence = norm / w_power;
    return est;
}

std::pair<double, double> gcc_phat(const AudioBuffer& a, const AudioBuffer& b, double max_lag_s) {
    validate(a, "gcc_phat a");
    validate(b, "gcc_phat b");
    if (a.sample_rate_hz != b.sample_rate_hz)
        throw std::invalid_argument("gcc_phat: sample rates differ");
    if (a.size() != b.size())
        throw std::invalid_argument("gcc_phat: signals must share length");
    const int rate = a.sample_rate_hz;
    const long long max_lag = std::llround(max_lag_s * rate);
    if (max_lag < 1) throw std::invalid_argument("gcc_phat: max_lag below one sample");
    if (static_cast<std::size_t>(2 * max_lag) > a.size())
        throw std::invalid_argument("gcc_phat: max_lag exceeds half the signal length");
    if (energy(a.samples) <= 0.0 && energy(b.samples) <= 0.0)
        throw std::invalid_argument("gcc_phat: both inputs silent");

    // Pad so the circular correlation cannot wrap within +-max_lag.
    const std::size_t n = fft::next_pow2(a.size() + static_cast<std::size_t>(max_lag) + 1);
    auto fa = fft::rfft(a.samples, n);
    auto fb = fft::rfft(b.samples, n);
    std::vector<std::complex<double>> cross(fa.size());
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const std::complex<double> g = std::conj(fa[i]) * fb[i];
        cross[i] = g / (std::abs(g) + 1e-12);
    }
    const auto corr = fft::irfft(cross, n);

    // Lag k lives at index k mod n.
    auto at_lag = [&](long long lag) {
        const long long idx = lag >= 0 ? lag : static_cast<long long>(n) + lag;
        return corr[static_cast<std::size_t>(idx)];
    };
    long long best = -max_lag;
    double best_val = at_lag(best);
    for (long long lag = -max_lag; lag <= max_lag; ++lag) {
        const double v = at_lag(lag);
        if (v > best_val) {
            best_val = v;
            best = lag;
        }
    }

    // Parabolic refinement around the peak.
    double delta = 0.0;
    const double y0 = at_lag(best - 1), y1 = best_val, y2 = at_lag(best + 1);
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-300) delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);

    return {(static_cast<double>(best) + delta) / rate, best_val};
}

AngularError angular_error(const Direction& est, const Direction& truth) {
    AngularError err;
    double d = std::fmod(est.azimuth_deg - truth.azimuth_deg, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    err.d_azimuth_deg = d;
    err.d_elevation_deg = est.elevation_deg - truth.elevation_deg;

    const Vec3 u = spherical_to_cartesian(est);
    const Vec3 v = spherical_to_cartesian(truth);
    const double dot = std::clamp(u.x * v.x + u.y * v.y + u.z * v.z, -1.0, 1.0);
    err.great_circle_deg = std::acos(dot) * 180.0 / std::numbers::pi;
    return err;
}

}  // namespace ambise
