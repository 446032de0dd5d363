#include "ambise/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "ambise/dsp.hpp"
#include "ambise/wav.hpp"

namespace ambise {

namespace fs = std::filesystem;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t FixtureRng::next_u64() {
    // splitmix64; fixed algorithm keeps fixtures reproducible everywhere.
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double FixtureRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double FixtureRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double FixtureRng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
}

namespace {

void normalize_rms(AudioBuffer& buf, double target_rms) {
    const double r = rms(buf.samples);
    if (r <= 0.0) return;
    const double g = target_rms / r;
    for (double& v : buf.samples) v *= g;
}

Direction random_direction(FixtureRng& rng) {
    const double az = rng.uniform(-180.0, 180.0);
    const double el = std::asin(rng.uniform(-1.0, 1.0)) * 180.0 / std::numbers::pi;
    return {az, el};
}

}  // namespace

namespace {

AudioBuffer harmonic_voice(FixtureRng& rng, double duration_s, int sample_rate_hz,
                           double env_floor, double rolloff_pow, double rolloff_hz) {
    const std::size_t len = static_cast<std::size_t>(duration_s * sample_rate_hz);
    AudioBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.assign(len, 0.0);

    const double f0 = rng.uniform(100.0, 180.0);
    const int harmonics = std::min(40, static_cast<int>(sample_rate_hz / 2.0 / f0) - 1);
    std::vector<double> amp(static_cast<std::size_t>(harmonics));
    std::vector<double> phase(static_cast<std::size_t>(harmonics));
    for (int h = 0; h < harmonics; ++h) {
        const double f = f0 * (h + 1);
        amp[static_cast<std::size_t>(h)] =
            std::pow(h + 1.0, -rolloff_pow) * std::exp(-f / rolloff_hz) *
            (1.0 + 0.5 * std::cos(kTwoPi * f / 1100.0));  // crude formant-ish ripple
        phase[static_cast<std::size_t>(h)] = rng.uniform(0.0, kTwoPi);
    }

    // Syllabic gating plus a touch of breath noise for bandwidth.
    const double syl_hz = rng.uniform(2.5, 4.5);
    const double syl_phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        double v = 0.0;
        for (int h = 0; h < harmonics; ++h)
            v += amp[static_cast<std::size_t>(h)] *
                 std::sin(kTwoPi * f0 * (h + 1) * t + phase[static_cast<std::size_t>(h)]);
        const double gate = 0.5 - 0.5 * std::cos(kTwoPi * syl_hz * t + syl_phase);
        const double env = env_floor + (1.0 - env_floor) * gate * gate;
        out.samples[i] = env * (v + 0.02 * rng.gaussian());
    }
    normalize_rms(out, 0.1);
    return out;
}

}  // namespace

AudioBuffer synthetic_speech(FixtureRng& rng, double duration_s, int sample_rate_hz) {
    return harmonic_voice(rng, duration_s, sample_rate_hz, 0.1, 0.8, 3000.0);
}

AudioBuffer sustained_voice(FixtureRng& rng, double duration_s, int sample_rate_hz) {
    return harmonic_voice(rng, duration_s, sample_rate_hz, 0.4, 0.4, 6000.0);
}

AudioBuffer white_noise(FixtureRng& rng, std::size_t length, int sample_rate_hz) {
    AudioBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.resize(length);
    for (double& v : out.samples) v = 0.1 * rng.gaussian();
    return out;
}

AudioBuffer babble_noise(FixtureRng& rng, double duration_s, int sample_rate_hz) {
    AudioBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.assign(static_cast<std::size_t>(duration_s * sample_rate_hz), 0.0);
    for (int talker = 0; talker < 4; ++talker) {
        AudioBuffer voice = synthetic_speech(rng, duration_s, sample_rate_hz);
        const std::size_t shift =
            static_cast<std::size_t>(rng.uniform(0.0, 0.4) * sample_rate_hz);
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] += voice.samples[(i + shift) % voice.samples.size()];
    }
    normalize_rms(out, 0.1);
    return out;
}

AudioBuffer tonal_noise(FixtureRng& rng, double duration_s, int sample_rate_hz) {
    AudioBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.assign(static_cast<std::size_t>(duration_s * sample_rate_hz), 0.0);
    const double base = rng.uniform(90.0, 130.0);
    for (int k = 1; k <= 8; ++k) {
        const double f = base * k * (1.0 + 0.002 * rng.gaussian());
        const double a = 1.0 / k;
        const double ph = rng.uniform(0.0, kTwoPi);
        const double wob_hz = rng.uniform(0.3, 0.8);
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const double t = static_cast<double>(i) / sample_rate_hz;
            out.samples[i] += a * (1.0 + 0.2 * std::sin(kTwoPi * wob_hz * t)) *
                              std::sin(kTwoPi * f * t + ph);
        }
    }
    normalize_rms(out, 0.1);
    return out;
}

RirSet exp_decay_rir(FixtureRng& rng, const Direction& dir, double drr_db, double rt60_s,
                     int sample_rate_hz, double w_gain) {
    const std::size_t direct_at = 64;
    const std::size_t gap = 16;
    const std::size_t len =
        direct_at + gap + static_cast<std::size_t>(rt60_s * sample_rate_hz * 1.2);
    RirSet rir;
    rir.rate_hz = sample_rate_hz;
    for (auto* taps : {&rir.h_w, &rir.h_x, &rir.h_y, &rir.h_z}) taps->assign(len, 0.0);

    const Vec3 u = spherical_to_cartesian(dir);
    rir.h_w[direct_at] = w_gain;
    rir.h_x[direct_at] = u.x;
    rir.h_y[direct_at] = u.y;
    rir.h_z[direct_at] = u.z;

    // Diffuse tail. W carries the pressure; each velocity axis carries 2/3 of
    // the W energy for an isotropic field with the traditional W scaling.
    const double tau = rt60_s / 6.9077552789821359;  // ln(1e6)
    double tail_energy_unit = 0.0;
    std::vector<double> envelope(len, 0.0);
    for (std::size_t i = direct_at + gap; i < len; ++i) {
        const double t = static_cast<double>(i - direct_at - gap) / sample_rate_hz;
        envelope[i] = std::exp(-t / (2.0 * tau));  // amplitude decay; energy ~ exp(-t/tau)
        tail_energy_unit += envelope[i] * envelope[i];
    }
    const double direct_w_energy = w_gain * w_gain;
    const double tail_w_energy = direct_w_energy / std::pow(10.0, drr_db / 10.0);
    const double sigma_w = std::sqrt(tail_w_energy / tail_energy_unit);
    const double sigma_v = sigma_w * std::sqrt(2.0 / 3.0);
    for (std::size_t i = direct_at + gap; i < len; ++i) {
        rir.h_w[i] = sigma_w * envelope[i] * rng.gaussian();
        rir.h_x[i] = sigma_v * envelope[i] * rng.gaussian();
        rir.h_y[i] = sigma_v * envelope[i] * rng.gaussian();
        rir.h_z[i] = sigma_v * envelope[i] * rng.gaussian();
    }
    return rir;
}

BFormatScene diffuse_noise_scene(FixtureRng& rng, std::size_t length, int sample_rate_hz) {
    BFormatScene scene;
    scene.w = white_noise(rng, length, sample_rate_hz);
    scene.x = white_noise(rng, length, sample_rate_hz);
    scene.y = white_noise(rng, length, sample_rate_hz);
    scene.z = white_noise(rng, length, sample_rate_hz);
    const double velocity_scale = std::sqrt(2.0 / 3.0);
    for (AudioBuffer* ch : {&scene.x, &scene.y, &scene.z})
        for (double& v : ch->samples) v *= velocity_scale;
    return scene;
}

namespace {

AudioBuffer delayed(const AudioBuffer& src, long long delay) {
    AudioBuffer out;
    out.sample_rate_hz = src.sample_rate_hz;
    out.samples.assign(src.size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) {
        const long long j = static_cast<long long>(i) - delay;
        if (j >= 0 && j < static_cast<long long>(src.size()))
            out.samples[i] = src.samples[static_cast<std::size_t>(j)];
    }
    return out;
}

BFormatScene delayed_scene(const BFormatScene& scene, long long delay) {
    BFormatScene out;
    out.w = delayed(scene.w, delay);
    out.x = delayed(scene.x, delay);
    out.y = delayed(scene.y, delay);
    out.z = delayed(scene.z, delay);
    return out;
}

AudioBuffer make_noise(FixtureRng& rng, const std::string& kind, double duration_s,
                       std::size_t length, int rate) {
    if (kind == "babble") return babble_noise(rng, duration_s, rate);
    if (kind == "tonal") return tonal_noise(rng, duration_s, rate);
    if (kind == "white") return white_noise(rng, length, rate);
    throw std::invalid_argument("synth_fixtures: unknown noise kind '" + kind + "'");
}

}  // namespace

std::string synth_fixtures(const SynthConfig& config, std::uint64_t seed,
                           const std::string& out_dir) {
    if (config.num_directions == 0 || config.snr_grid_db.empty())
        throw std::invalid_argument("synth_fixtures: empty direction or SNR grid");
    if (config.noise_kinds.empty())
        throw std::invalid_argument("synth_fixtures: no noise kinds configured");
    fs::create_directories(out_dir);

    const int rate = config.sample_rate_hz;
    const double c_sound = 343.0;
    const double mic_spacing_m = 0.2;

    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    std::size_t index = 0;
    FixtureRng rng(seed);
    for (std::size_t d = 0; d < config.num_directions; ++d) {
        const Direction dir = random_direction(rng);
        // One utterance per direction; SNR cells share it so scores are
        // comparable along the grid.
        const AudioBuffer speech = synthetic_speech(rng, config.duration_s, rate);
        for (std::size_t s = 0; s < config.snr_grid_db.size(); ++s) {
            const double snr_db = config.snr_grid_db[s];
            const std::string& noise_kind =
                config.noise_kinds[index % config.noise_kinds.size()];
            char id[32];
            std::snprintf(id, sizeof(id), "fx%04zu", index);
            ++index;

            BFormatScene mixed;
            std::optional<Direction> truth;
            if (config.kind == SynthConfig::Kind::array_surrogate) {
                // Equal-gain channels with integer inter-channel delays.
                BFormatScene sig;
                std::array<AudioBuffer*, 4> chans = sig.channels();
                *chans[0] = speech;
                for (std::size_t c = 1; c < 4; ++c)
                    *chans[c] = delayed(speech, 1 + static_cast<long long>(rng.uniform(0.0, 10.0)));
                BFormatScene noise;
                std::array<AudioBuffer*, 4> nch = noise.channels();
                for (std::size_t c = 0; c < 4; ++c) {
                    *nch[c] = make_noise(rng, noise_kind, config.duration_s, speech.size(), rate);
                    nch[c]->samples.resize(speech.size(), 0.0);
                }
                mixed = mix_scene(sig, noise, snr_db);
            } else {
                BFormatScene clean_scene;
                if (config.kind == SynthConfig::Kind::foa_anechoic) {
                    clean_scene = encode_plane_wave(speech, dir, config.w_gain);
                } else {
                    const RirSet rir = exp_decay_rir(rng, dir, config.direct_ratio_db,
                                                     config.rt60_s, rate, config.w_gain);
                    clean_scene = apply_rir(speech, rir);
                }
                BFormatScene noise_scene;
                if (noise_kind == "white") {
                    noise_scene = diffuse_noise_scene(rng, clean_scene.size(), rate);
                } else {
                    AudioBuffer n = make_noise(rng, noise_kind, config.duration_s,
                                               clean_scene.size(), rate);
                    noise_scene = encode_plane_wave(n, random_direction(rng), config.w_gain);
                }
                mixed = mix_scene(clean_scene, noise_scene, snr_db);
                truth = dir;
            }

            // Keep 16-bit quantization benign: pull everything under full
            // scale with one common gain so SNR and score relations survive.
            double peak = 0.0;
            for (const AudioBuffer* ch : mixed.channels())
                for (double v : ch->samples) peak = std::max(peak, std::abs(v));
            for (double v : speech.samples) peak = std::max(peak, std::abs(v));
            AudioBuffer target = speech;
            if (peak > 0.95) {
                const double g = 0.95 / peak;
                for (AudioBuffer* ch : mixed.channels())
                    for (double& v : ch->samples) v *= g;
                for (double& v : target.samples) v *= g;
            }

            const std::string mic_a_name = std::string(id) + "_mic_a.wav";
            const std::string target_name = std::string(id) + "_target.wav";
            write_wav((fs::path(out_dir) / mic_a_name).string(),
                      {mixed.w, mixed.x, mixed.y, mixed.z}, WavFormat::pcm16);
            write_wav((fs::path(out_dir) / target_name).string(), {target}, WavFormat::pcm16);

            nlohmann::ordered_json entry;
            entry["id"] = id;
            entry["mic_a"] = mic_a_name;
            if (config.write_mic_b && config.kind != SynthConfig::Kind::array_surrogate) {
                // Second array displaced along +X; a source on the -X side
                // reaches it later, so its channels lag by -u.x * d / c.
                const Vec3 u = spherical_to_cartesian(dir);
                const long long lag = std::llround(-rate * mic_spacing_m * u.x / c_sound);
                BFormatScene mic_b = delayed_scene(mixed, lag);
                const std::string mic_b_name = std::string(id) + "_mic_b.wav";
                write_wav((fs::path(out_dir) / mic_b_name).string(),
                          {mic_b.w, mic_b.x, mic_b.y, mic_b.z}, WavFormat::pcm16);
                entry["mic_b"] = mic_b_name;
            }
            entry["target"] = target_name;
            if (truth) entry["doa_sph"] = {truth->azimuth_deg, truth->elevation_deg};
            entry["snr_db"] = snr_db;
            entry["noise"] = noise_kind;
            manifest.push_back(entry);
        }
    }

    const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw std::runtime_error(manifest_path + ": cannot write manifest");
    out << manifest.dump(2) << "\n";
    return manifest_path;
}

}  // namespace ambise
