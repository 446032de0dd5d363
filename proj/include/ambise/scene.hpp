// scene.hpp -- first-order ambisonic (B-format) scenes: encoding, room
// responses, mixing and steered mono extraction.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "ambise/audio.hpp"

namespace ambise {

/// Traditional B-format scales W by 1/sqrt(2); set w_gain = 1 for SN3D input.
constexpr double kDefaultWGain = 0.70710678118654752440;

/// Azimuth counterclockwise from +X in [-180, 180); elevation up from the
/// horizontal plane in [-90, 90].
struct Direction {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

/// Wraps azimuth into [-180, 180), reflecting over the pole when elevation
/// leaves [-90, 90].
Direction normalized(Direction dir);

/// Unit vector (cos az cos el, sin az cos el, sin el).
Vec3 spherical_to_cartesian(const Direction& dir);

/// Inverse of spherical_to_cartesian; the input need not be unit length.
/// Throws on the zero vector.
Direction cartesian_to_spherical(const Vec3& v);

/// Four synchronized channels in W, X, Y, Z order.
struct BFormatScene {
    AudioBuffer w, x, y, z;

    std::size_t size() const { return w.size(); }
    int sample_rate_hz() const { return w.sample_rate_hz; }
    std::array<const AudioBuffer*, 4> channels() const { return {&w, &x, &y, &z}; }
    std::array<AudioBuffer*, 4> channels() { return {&w, &x, &y, &z}; }
};

/// Throws unless all four channels are valid, equally long and equally rated.
void validate(const BFormatScene& scene, const std::string& what = "scene");

/// A measured or synthetic B-format room impulse response.
struct RirSet {
    std::vector<double> h_w, h_x, h_y, h_z;
    int rate_hz = 0;
};

void validate(const RirSet& rir, const std::string& what = "rir");

/// Loads a 4-channel WAV as an impulse-response set.
RirSet load_rir(const std::string& path);

/// Anechoic plane-wave encoder: W = w_gain*s, X/Y/Z carry the direction
/// cosines of dir.
BFormatScene encode_plane_wave(const AudioBuffer& mono, const Direction& dir,
                               double w_gain = kDefaultWGain);

/// Convolves a dry mono signal with each RIR channel.
BFormatScene apply_rir(const AudioBuffer& mono, const RirSet& rir);

/// Adds noise scaled so the W-channel energy ratio over the overlap equals
/// snr_db; the shorter scene is zero-padded at the tail. snr_db = +inf
/// returns the speech scene unchanged.
BFormatScene mix_scene(const BFormatScene& speech, const BFormatScene& noise, double snr_db);

/// First-order steered extraction with polar pattern p + (1-p)cos(gamma);
/// unit gain toward dir for scenes produced by encode_plane_wave with the
/// same w_gain.
AudioBuffer steer_to_mono(const BFormatScene& scene, const Direction& dir,
                          double pattern_p = 0.5, double w_gain = kDefaultWGain);

}  // namespace ambise
