// enhance.hpp -- the two enhancement families: a magnitude-mask denoiser
// that reuses the noisy phase (single-channel, applied per channel or with
// one shared mask) and an NCC-aligned delay-and-sum beamformer.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ambise/audio.hpp"
#include "ambise/scene.hpp"
#include "ambise/stft.hpp"

namespace ambise {

/// Parameters of the spectral gain rule.
struct MaskParams {
    double noise_percentile = 0.2;  // quantile of |Y|^2 across frames, per bin
    double floor_gain = 0.05;       // lower clamp of the gain
    double oversubtraction = 1.5;   // noise overestimate factor
    std::size_t smoothing_frames = 2;  // moving-average radius along time
};

void validate(const MaskParams& params);

struct BeamformerParams {
    double window_ms = 16.0;
    std::size_t max_lag_samples = 32;
    std::size_t ref_channel = 0;
};

/// Per-bin noise power: the noise_percentile quantile of |Y|^2 across
/// frames. Requires at least 5 frames.
std::vector<double> estimate_noise_psd(const Spectrogram& spec, const MaskParams& params);

/// Wiener-style gain max(0, 1 - oversubtraction*N/|Y|^2), clamped to
/// [floor_gain, 1], then moving-average smoothed along time. Row-major
/// [frame][bin], same shape as the spectrogram.
std::vector<double> compute_mask(const Spectrogram& spec, const std::vector<double>& noise_psd,
                                 const MaskParams& params);

/// Magnitude-domain enhancement with phase passthrough: the output STFT is
/// mask * Y, so the noisy phase survives untouched. Output length equals
/// input length. noise_psd_override substitutes the internal estimate
/// (useful for oracle tests and shared-mask processing).
AudioBuffer enhance_siso(const AudioBuffer& signal, const MaskParams& params,
                         const StftConfig& config,
                         const std::optional<std::vector<double>>& noise_psd_override = std::nullopt);

enum class MultiMode {
    per_channel,  // independent mask per channel
    shared_mask,  // one mask from W applied to all four channels
};

/// Channel-wise application of the single-channel enhancer to a B-format
/// scene. Both modes leave every channel's phase untouched; shared_mask
/// additionally leaves all inter-channel level ratios untouched. Those
/// guarantees are exact on the time-frequency representation the masks act
/// on, which enhance_multichannel_tf exposes.
BFormatScene enhance_multichannel(const BFormatScene& scene, MultiMode mode,
                                  const MaskParams& params, const StftConfig& config);

struct EnhancedScene {
    BFormatScene scene;                // resynthesized waveforms
    std::vector<Spectrogram> before;   // analysis of each input channel (W, X, Y, Z)
    std::vector<Spectrogram> after;    // masked spectrograms, pre-inversion
};

EnhancedScene enhance_multichannel_tf(const BFormatScene& scene, MultiMode mode,
                                      const MaskParams& params, const StftConfig& config);

struct AlignResult {
    std::vector<int> delays;          // samples; reference entry is 0
    std::vector<bool> degenerate;     // channel had no usable energy
};

/// Integer delay per channel maximizing the windowed normalized
/// cross-correlation with the reference, NCC curves summed over windows.
AlignResult ncc_align(const std::vector<AudioBuffer>& channels, const BeamformerParams& params);

/// Advances each channel by its delay (zero fill) and averages with 1/M.
AudioBuffer delay_sum_beamform(const std::vector<AudioBuffer>& channels,
                               const std::vector<int>& delays);

}  // namespace ambise
