#include "ambise/scene.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ambise/dsp.hpp"
#include "ambise/wav.hpp"

namespace ambise {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double wrap_azimuth(double az) {
    double a = std::fmod(az + 180.0, 360.0);
    if (a < 0) a += 360.0;
    return a - 180.0;
}

}  // namespace

Direction normalized(Direction dir) {
    double el = std::fmod(dir.elevation_deg, 360.0);
    double az = dir.azimuth_deg;
    if (el > 180.0) el -= 360.0;
    if (el < -180.0) el += 360.0;
    if (el > 90.0) {
        el = 180.0 - el;
        az += 180.0;
    } else if (el < -90.0) {
        el = -180.0 - el;
        az += 180.0;
    }
    return {wrap_azimuth(az), el};
}

Vec3 spherical_to_cartesian(const Direction& dir) {
    const double az = dir.azimuth_deg * kDegToRad;
    const double el = dir.elevation_deg * kDegToRad;
    return {std::cos(az) * std::cos(el), std::sin(az) * std::cos(el), std::sin(el)};
}

Direction cartesian_to_spherical(const Vec3& v) {
    const double norm = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (norm < 1e-300) throw std::invalid_argument("cartesian_to_spherical: zero vector");
    const double horiz = std::hypot(v.x, v.y);
    const double az = (horiz == 0.0) ? 0.0 : std::atan2(v.y, v.x) * kRadToDeg;
    const double el = std::atan2(v.z, horiz) * kRadToDeg;
    return {wrap_azimuth(az), el};
}

void validate(const BFormatScene& scene, const std::string& what) {
    validate(scene.w, what + " W");
    validate(scene.x, what + " X");
    validate(scene.y, what + " Y");
    validate(scene.z, what + " Z");
    const std::size_t len = scene.w.size();
    const int rate = scene.w.sample_rate_hz;
    for (const AudioBuffer* ch : scene.channels())
        if (ch->size() != len || ch->sample_rate_hz != rate)
            throw std::invalid_argument(what + ": channels must share length and rate");
}

void validate(const RirSet& rir, const std::string& what) {
    if (rir.rate_hz <= 0) throw std::invalid_argument(what + ": rate must be positive");
    const std::size_t len = rir.h_w.size();
    if (len == 0) throw std::invalid_argument(what + ": empty impulse response");
    for (const auto* taps : {&rir.h_w, &rir.h_x, &rir.h_y, &rir.h_z}) {
        if (taps->size() != len)
            throw std::invalid_argument(what + ": channels must share length");
        if (!all_finite(*taps)) throw std::invalid_argument(what + ": non-finite taps");
    }
}

RirSet load_rir(const std::string& path) {
    auto channels = read_wav(path);
    if (channels.size() != 4)
        throw std::invalid_argument(path + ": expected 4 RIR channels, found " +
                                    std::to_string(channels.size()));
    RirSet rir;
    rir.rate_hz = channels[0].sample_rate_hz;
    rir.h_w = std::move(channels[0].samples);
    rir.h_x = std::move(channels[1].samples);
    rir.h_y = std::move(channels[2].samples);
    rir.h_z = std::move(channels[3].samples);
    validate(rir, path);
    return rir;
}

BFormatScene encode_plane_wave(const AudioBuffer& mono, const Direction& dir, double w_gain) {
    validate(mono, "encode_plane_wave input");
    const Vec3 u = spherical_to_cartesian(dir);
    BFormatScene scene;
    scene.w = mono;
    scene.x = mono;
    scene.y = mono;
    scene.z = mono;
    for (std::size_t i = 0; i < mono.size(); ++i) {
        const double s = mono.samples[i];
        scene.w.samples[i] = w_gain * s;
        scene.x.samples[i] = u.x * s;
        scene.y.samples[i] = u.y * s;
        scene.z.samples[i] = u.z * s;
    }
    return scene;
}

BFormatScene apply_rir(const AudioBuffer& mono, const RirSet& rir) {
    validate(mono, "apply_rir input");
    validate(rir);
    if (mono.sample_rate_hz != rir.rate_hz)
        throw std::invalid_argument("apply_rir: signal and RIR rates differ");
    BFormatScene scene;
    scene.w = fft_convolve(mono, rir.h_w);
    scene.x = fft_convolve(mono, rir.h_x);
    scene.y = fft_convolve(mono, rir.h_y);
    scene.z = fft_convolve(mono, rir.h_z);
    return scene;
}

BFormatScene mix_scene(const BFormatScene& speech, const BFormatScene& noise, double snr_db) {
    validate(speech, "mix speech");
    if (std::isinf(snr_db) && snr_db > 0) return speech;
    validate(noise, "mix noise");
    if (speech.sample_rate_hz() != noise.sample_rate_hz())
        throw std::invalid_argument("mix_scene: sample rates differ");

    const std::size_t overlap = std::min(speech.size(), noise.size());
    double e_speech = 0.0, e_noise = 0.0;
    for (std::size_t i = 0; i < overlap; ++i) {
        e_speech += speech.w.samples[i] * speech.w.samples[i];
        e_noise += noise.w.samples[i] * noise.w.samples[i];
    }
    if (e_noise <= 0.0)
        throw std::invalid_argument("mix_scene: noise W channel is silent over the overlap");
    const double gain = std::sqrt(e_speech / (e_noise * std::pow(10.0, snr_db / 10.0)));

    const std::size_t len = std::max(speech.size(), noise.size());
    BFormatScene out;
    auto mix_channel = [&](const AudioBuffer& s, const AudioBuffer& n) {
        AudioBuffer ch;
        ch.sample_rate_hz = speech.sample_rate_hz();
        ch.samples.resize(len, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) ch.samples[i] += s.samples[i];
        for (std::size_t i = 0; i < n.size(); ++i) ch.samples[i] += gain * n.samples[i];
        return ch;
    };
    out.w = mix_channel(speech.w, noise.w);
    out.x = mix_channel(speech.x, noise.x);
    out.y = mix_channel(speech.y, noise.y);
    out.z = mix_channel(speech.z, noise.z);
    return out;
}

AudioBuffer steer_to_mono(const BFormatScene& scene, const Direction& dir, double pattern_p,
                          double w_gain) {
    validate(scene, "steer_to_mono scene");
    if (pattern_p < 0.0 || pattern_p > 1.0)
        throw std::invalid_argument("steer_to_mono: pattern_p must be in [0, 1]");
    const Vec3 u = spherical_to_cartesian(dir);
    AudioBuffer out;
    out.sample_rate_hz = scene.sample_rate_hz();
    out.samples.resize(scene.size());
    const double q = 1.0 - pattern_p;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        out.samples[i] = pattern_p * (scene.w.samples[i] / w_gain) +
                         q * (u.x * scene.x.samples[i] + u.y * scene.y.samples[i] +
                              u.z * scene.z.samples[i]);
    }
    return out;
}

}  // namespace ambise
