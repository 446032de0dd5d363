// Intelligibility and spatial-deviation metrics: self-score and scaling
// identities, the brute-force reference pipeline, SNR ordering, and
// level/phase bookkeeping.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ambise/dsp.hpp"
#include "ambise/enhance.hpp"
#include "ambise/fixtures.hpp"
#include "ambise/metrics.hpp"
#include "ambise/scene.hpp"
#include "oracles.hpp"

using namespace ambise;

namespace {

const StftConfig kCfg(512, 256, Window::sqrt_hann);

AudioBuffer add_noise(const AudioBuffer& clean, const AudioBuffer& noise, double snr_db) {
    const double gain =
        std::sqrt(energy(clean.samples) / (energy(noise.samples) * std::pow(10.0, snr_db / 10.0)));
    AudioBuffer out = clean;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] += gain * noise.samples[i];
    return out;
}

}  // namespace

TEST_CASE("stoi identities") {
    FixtureRng rng(2000);
    const AudioBuffer speech10k = synthetic_speech(rng, 2.0, 10000);
    const AudioBuffer speech16k = synthetic_speech(rng, 2.0, 16000);

    SUBCASE("self-score is one") {
        CHECK(std::abs(stoi(speech10k, speech10k).value - 1.0) < 1e-6);
        CHECK(std::abs(stoi(speech16k, speech16k).value - 1.0) < 1e-6);
    }

    SUBCASE("invariant to common and degraded-only scaling") {
        AudioBuffer degraded = add_noise(speech10k, white_noise(rng, speech10k.size(), 10000), 5.0);
        const double base = stoi(speech10k, degraded).value;

        AudioBuffer sx = speech10k;
        AudioBuffer sy = degraded;
        for (double& v : sx.samples) v *= 0.31;
        for (double& v : sy.samples) v *= 0.31;
        CHECK(std::abs(stoi(sx, sy).value - base) < 1e-9);

        AudioBuffer dy = degraded;
        for (double& v : dy.samples) v *= 7.7;
        CHECK(std::abs(stoi(speech10k, dy).value - base) < 1e-9);
    }

    SUBCASE("longer degraded input is trimmed to the clean length") {
        AudioBuffer degraded = add_noise(speech10k, white_noise(rng, speech10k.size(), 10000), 5.0);
        AudioBuffer padded = degraded;
        padded.samples.resize(padded.samples.size() + 3000, 0.25);
        CHECK(stoi(speech10k, padded).value == doctest::Approx(stoi(speech10k, degraded).value));
    }

    SUBCASE("error paths") {
        AudioBuffer wrong_rate = speech10k;
        wrong_rate.sample_rate_hz = 16000;
        CHECK_THROWS(stoi(speech10k, wrong_rate));

        AudioBuffer silent;
        silent.sample_rate_hz = 10000;
        silent.samples.assign(20000, 0.0);
        CHECK_THROWS(stoi(silent, silent));

        AudioBuffer blip;
        blip.sample_rate_hz = 10000;
        blip.samples.assign(2000, 0.0);  // well under 30 frames
        for (std::size_t i = 0; i < 500; ++i) blip.samples[i] = 0.1;
        CHECK_THROWS(stoi(blip, blip));
    }
}

TEST_CASE("stoi agrees with the brute-force reference pipeline") {
    FixtureRng rng(2100);
    const AudioBuffer speech = synthetic_speech(rng, 2.0, 10000);

    SUBCASE("white noise at 0 dB") {
        const AudioBuffer degraded = add_noise(speech, white_noise(rng, speech.size(), 10000), 0.0);
        const double mine = stoi(speech, degraded).value;
        const double ref = oracle::reference_stoi(speech, degraded);
        CHECK(std::abs(mine - ref) < 1e-3);
        CHECK(mine > 0.4);
        CHECK(mine < 1.0);
    }

    SUBCASE("babble at 5 dB") {
        const AudioBuffer degraded = add_noise(speech, babble_noise(rng, 2.0, 10000), 5.0);
        CHECK(std::abs(stoi(speech, degraded).value - oracle::reference_stoi(speech, degraded)) <
              1e-3);
    }

    SUBCASE("scores rise strictly with SNR, matching the reference ordering") {
        const AudioBuffer noise = white_noise(rng, speech.size(), 10000);
        double prev_mine = -2.0, prev_ref = -2.0;
        for (double snr : {-5.0, 0.0, 5.0, 10.0, 20.0}) {
            const AudioBuffer degraded = add_noise(speech, noise, snr);
            const double mine = stoi(speech, degraded).value;
            const double ref = oracle::reference_stoi(speech, degraded);
            CHECK(std::abs(mine - ref) < 1e-3);
            CHECK(mine > prev_mine);
            CHECK(ref > prev_ref);
            prev_mine = mine;
            prev_ref = ref;
        }
    }

    SUBCASE("16 kHz scoring matches scoring of pre-resampled inputs") {
        const AudioBuffer speech16 = synthetic_speech(rng, 2.0, 16000);
        const AudioBuffer degraded16 =
            add_noise(speech16, white_noise(rng, speech16.size(), 16000), 3.0);
        const double direct = stoi(speech16, degraded16).value;
        const double via10k = stoi(resample(speech16, 10000), resample(degraded16, 10000)).value;
        CHECK(std::abs(direct - via10k) < 1e-9);
    }
}

TEST_CASE("icld_icpd_deviation") {
    FixtureRng rng(2200);
    const AudioBuffer speech = synthetic_speech(rng, 1.0, 16000);
    const BFormatScene scene = mix_scene(encode_plane_wave(speech, {25.0, 10.0}),
                                         diffuse_noise_scene(rng, speech.size(), 16000), 12.0);

    SUBCASE("identical scenes deviate by zero") {
        const SpatialDeviation dev = icld_icpd_deviation(scene, scene, kCfg, -80.0);
        CHECK(dev.icld_rms_db == 0.0);
        CHECK(dev.icpd_rms_rad == 0.0);
        CHECK(dev.active_bin_count > 0);
    }

    SUBCASE("per-channel enhancement leaves phase differences untouched where masks act") {
        const EnhancedScene enh =
            enhance_multichannel_tf(scene, MultiMode::per_channel, MaskParams{}, kCfg);
        const SpatialDeviation dev = icld_icpd_deviation(enh.before, enh.after, -80.0);
        CHECK(dev.icpd_rms_rad < 1e-9);
    }

    SUBCASE("shared-mask enhancement leaves both untouched") {
        const EnhancedScene enh =
            enhance_multichannel_tf(scene, MultiMode::shared_mask, MaskParams{}, kCfg);
        const SpatialDeviation dev = icld_icpd_deviation(enh.before, enh.after, -80.0);
        CHECK(dev.icld_rms_db < 1e-9);
        CHECK(dev.icpd_rms_rad < 1e-9);
    }

    SUBCASE("consistent channel reordering leaves the deviations unchanged") {
        BFormatScene jittered = scene;
        for (AudioBuffer* ch : jittered.channels())
            for (double& v : ch->samples) v *= 1.001;
        jittered.x.samples[100] += 0.05;
        const SpatialDeviation base = icld_icpd_deviation(scene, jittered, kCfg, -80.0);

        BFormatScene scene_swapped = scene;
        std::swap(scene_swapped.x, scene_swapped.z);
        BFormatScene jittered_swapped = jittered;
        std::swap(jittered_swapped.x, jittered_swapped.z);
        const SpatialDeviation swapped =
            icld_icpd_deviation(scene_swapped, jittered_swapped, kCfg, -80.0);
        CHECK(swapped.icld_rms_db == doctest::Approx(base.icld_rms_db).epsilon(1e-12));
        CHECK(swapped.icpd_rms_rad == doctest::Approx(base.icpd_rms_rad).epsilon(1e-12));
        CHECK(swapped.active_bin_count == base.active_bin_count);
    }

    SUBCASE("no active bins is an error") {
        BFormatScene tiny = scene;
        for (AudioBuffer* ch : tiny.channels())
            for (double& v : ch->samples) v *= 1e-12;
        CHECK_THROWS(icld_icpd_deviation(tiny, tiny, kCfg, -80.0));
    }

    SUBCASE("shape mismatch is an error") {
        BFormatScene shorter = scene;
        for (AudioBuffer* ch : shorter.channels()) ch->samples.resize(scene.size() - 5);
        CHECK_THROWS(icld_icpd_deviation(scene, shorter, kCfg, -80.0));
    }
}
