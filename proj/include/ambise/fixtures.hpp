// fixtures.hpp -- deterministic synthetic scenes: speech/noise surrogates,
// synthetic room responses, and batch fixture generation with a manifest.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ambise/audio.hpp"
#include "ambise/scene.hpp"

namespace ambise {

/// Deterministic RNG used for every fixture so identical seeds produce
/// bit-identical files regardless of the standard library's distributions.
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double gaussian();                     // Box-Muller, unit variance

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Harmonic-rich, syllabically modulated surrogate for clean speech.
AudioBuffer synthetic_speech(FixtureRng& rng, double duration_s, int sample_rate_hz);

/// Sustained vowel-like tone: same harmonic construction but steadier
/// envelope and brighter spectrum, for localization fixtures where per-bin
/// SNR matters more than syllabic structure.
AudioBuffer sustained_voice(FixtureRng& rng, double duration_s, int sample_rate_hz);

AudioBuffer white_noise(FixtureRng& rng, std::size_t length, int sample_rate_hz);

/// Sum of shifted, detuned speech surrogates.
AudioBuffer babble_noise(FixtureRng& rng, double duration_s, int sample_rate_hz);

/// Harmonic hum with slow amplitude wobble.
AudioBuffer tonal_noise(FixtureRng& rng, double duration_s, int sample_rate_hz);

/// Direct-path impulse from dir plus an exponentially decaying diffuse tail
/// with the requested direct-to-reverberant W-channel energy ratio.
RirSet exp_decay_rir(FixtureRng& rng, const Direction& dir, double drr_db, double rt60_s,
                     int sample_rate_hz, double w_gain = kDefaultWGain);

/// Isotropic diffuse noise field stand-in: independent white channels with
/// the velocity axes carrying 2/3 of the W energy, as an isotropic field
/// does under the traditional W scaling.
BFormatScene diffuse_noise_scene(FixtureRng& rng, std::size_t length, int sample_rate_hz);

struct SynthConfig {
    enum class Kind {
        foa_anechoic,     // encoded plane waves
        foa_reverb,       // synthetic-RIR reverberant scenes
        array_surrogate,  // equal-gain channels with integer delays (spaced array)
    };
    Kind kind = Kind::foa_anechoic;
    std::size_t num_directions = 8;
    std::vector<double> snr_grid_db = {0.0, 10.0};
    std::vector<std::string> noise_kinds = {"white"};  // white | babble | tonal
    double duration_s = 2.0;
    int sample_rate_hz = 16000;
    double rt60_s = 0.3;
    double direct_ratio_db = 3.0;
    bool write_mic_b = true;  // FOA kinds only
    double w_gain = kDefaultWGain;
};

/// Writes one WAV pair (scene + target) per direction x SNR cell plus a
/// manifest.json into out_dir; returns the manifest path. Deterministic in
/// (config, seed). Directional noise kinds arrive from their own random
/// directions; "white" is diffuse (independent per channel). Manifest
/// entries carry the declared snr_db as an informational extra key.
std::string synth_fixtures(const SynthConfig& config, std::uint64_t seed,
                           const std::string& out_dir);

}  // namespace ambise
