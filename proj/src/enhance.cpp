#include "ambise/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ambise {

void validate(const MaskParams& params) {
    if (!(params.noise_percentile > 0.0 && params.noise_percentile < 1.0))
        throw std::invalid_argument("MaskParams: noise_percentile must be in (0, 1)");
    if (params.floor_gain < 0.0 || params.floor_gain > 1.0)
        throw std::invalid_argument("MaskParams: floor_gain must be in [0, 1]");
    if (params.oversubtraction < 1.0)
        throw std::invalid_argument("MaskParams: oversubtraction must be >= 1");
}

std::vector<double> estimate_noise_psd(const Spectrogram& spec, const MaskParams& params) {
    validate(params);
    const std::size_t frames = spec.num_frames();
    const std::size_t bins = spec.num_bins();
    if (frames < 5) throw std::invalid_argument("estimate_noise_psd: needs at least 5 frames");

    std::vector<double> psd(bins, 0.0);
    std::vector<double> power(frames);
    // Interpolated order statistic at position q*(n-1).
    const double pos = params.noise_percentile * static_cast<double>(frames - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, frames - 1);
    const double frac = pos - static_cast<double>(lo);
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t f = 0; f < frames; ++f) power[f] = std::norm(spec.at(f, b));
        std::nth_element(power.begin(), power.begin() + static_cast<long long>(lo), power.end());
        const double v_lo = power[lo];
        std::nth_element(power.begin(), power.begin() + static_cast<long long>(hi), power.end());
        const double v_hi = power[hi];
        psd[b] = v_lo + frac * (v_hi - v_lo);
    }
    return psd;
}

std::vector<double> compute_mask(const Spectrogram& spec, const std::vector<double>& noise_psd,
                                 const MaskParams& params) {
    validate(params);
    const std::size_t frames = spec.num_frames();
    const std::size_t bins = spec.num_bins();
    if (noise_psd.size() != bins)
        throw std::invalid_argument("compute_mask: noise PSD size does not match bin count");

    std::vector<double> mask(frames * bins);
    for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t b = 0; b < bins; ++b) {
            const double n = noise_psd[b];
            const double p = std::norm(spec.at(f, b));
            double gain;
            if (n <= 0.0)
                gain = 1.0;
            else if (p <= 0.0)
                gain = 0.0;
            else
                gain = std::max(0.0, 1.0 - params.oversubtraction * n / p);
            mask[f * bins + b] = std::clamp(gain, params.floor_gain, 1.0);
        }
    }

    if (params.smoothing_frames == 0) return mask;
    // Centered moving average along time, truncated at the ends.
    const long long r = static_cast<long long>(params.smoothing_frames);
    std::vector<double> smoothed(frames * bins);
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t f = 0; f < frames; ++f) {
            const long long first = std::max<long long>(0, static_cast<long long>(f) - r);
            const long long last =
                std::min<long long>(static_cast<long long>(frames) - 1, static_cast<long long>(f) + r);
            double acc = 0.0;
            for (long long k = first; k <= last; ++k)
                acc += mask[static_cast<std::size_t>(k) * bins + b];
            smoothed[f * bins + b] = acc / static_cast<double>(last - first + 1);
        }
    }
    return smoothed;
}

AudioBuffer enhance_siso(const AudioBuffer& signal, const MaskParams& params,
                         const StftConfig& config,
                         const std::optional<std::vector<double>>& noise_psd_override) {
    Spectrogram spec = stft(signal, config);
    const auto psd = noise_psd_override ? *noise_psd_override : estimate_noise_psd(spec, params);
    const auto mask = compute_mask(spec, psd, params);
    const std::size_t bins = spec.num_bins();
    for (std::size_t f = 0; f < spec.num_frames(); ++f)
        for (std::size_t b = 0; b < bins; ++b)
            spec.at(f, b) *= mask[f * bins + b];
    return istft(spec);
}

EnhancedScene enhance_multichannel_tf(const BFormatScene& scene, MultiMode mode,
                                      const MaskParams& params, const StftConfig& config) {
    validate(scene, "enhance_multichannel scene");
    EnhancedScene out;
    for (const AudioBuffer* ch : scene.channels()) out.before.push_back(stft(*ch, config));

    const std::size_t bins = out.before[0].num_bins();
    std::vector<double> shared;
    if (mode == MultiMode::shared_mask) {
        // One gain field from the pressure channel, reused everywhere, so
        // level and phase ratios between channels cancel exactly.
        const auto psd = estimate_noise_psd(out.before[0], params);
        shared = compute_mask(out.before[0], psd, params);
    }
    for (std::size_t c = 0; c < 4; ++c) {
        Spectrogram masked = out.before[c];
        const auto& mask = (mode == MultiMode::shared_mask)
                               ? shared
                               : compute_mask(masked, estimate_noise_psd(masked, params), params);
        for (std::size_t f = 0; f < masked.num_frames(); ++f)
            for (std::size_t b = 0; b < bins; ++b) masked.at(f, b) *= mask[f * bins + b];
        out.after.push_back(std::move(masked));
    }
    out.scene.w = istft(out.after[0]);
    out.scene.x = istft(out.after[1]);
    out.scene.y = istft(out.after[2]);
    out.scene.z = istft(out.after[3]);
    return out;
}

BFormatScene enhance_multichannel(const BFormatScene& scene, MultiMode mode,
                                  const MaskParams& params, const StftConfig& config) {
    return enhance_multichannel_tf(scene, mode, params, config).scene;
}

AlignResult ncc_align(const std::vector<AudioBuffer>& channels, const BeamformerParams& params) {
    if (channels.size() < 2) throw std::invalid_argument("ncc_align: needs at least 2 channels");
    const std::size_t len = channels[0].size();
    const int rate = channels[0].sample_rate_hz;
    for (const auto& ch : channels) {
        validate(ch, "ncc_align channel");
        if (ch.size() != len || ch.sample_rate_hz != rate)
            throw std::invalid_argument("ncc_align: channels must share length and rate");
    }
    if (params.ref_channel >= channels.size())
        throw std::invalid_argument("ncc_align: reference channel out of range");

    const std::size_t win =
        std::max<std::size_t>(8, static_cast<std::size_t>(params.window_ms * rate / 1000.0));
    const long long max_lag = static_cast<long long>(params.max_lag_samples);
    if (static_cast<std::size_t>(max_lag) >= win)
        throw std::invalid_argument("ncc_align: max_lag must be smaller than the window");

    const auto& ref = channels[params.ref_channel].samples;
    AlignResult result;
    result.delays.assign(channels.size(), 0);
    result.degenerate.assign(channels.size(), false);

    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (c == params.ref_channel) continue;
        const auto& sig = channels[c].samples;
        std::vector<double> ncc_sum(static_cast<std::size_t>(2 * max_lag + 1), 0.0);
        bool any_window = false;
        for (std::size_t start = 0; start + win <= len; start += win) {
            double e_ref = 0.0;
            for (std::size_t i = start; i < start + win; ++i) e_ref += ref[i] * ref[i];
            if (e_ref <= 0.0) continue;
            for (long long lag = -max_lag; lag <= max_lag; ++lag) {
                double dot = 0.0, e_sig = 0.0;
                for (std::size_t i = start; i < start + win; ++i) {
                    const long long j = static_cast<long long>(i) + lag;
                    if (j < 0 || j >= static_cast<long long>(len)) continue;
                    dot += ref[i] * sig[static_cast<std::size_t>(j)];
                    e_sig += sig[static_cast<std::size_t>(j)] * sig[static_cast<std::size_t>(j)];
                }
                if (e_sig <= 0.0) continue;
                ncc_sum[static_cast<std::size_t>(lag + max_lag)] += dot / std::sqrt(e_ref * e_sig);
                any_window = true;
            }
        }
        if (!any_window) {
            result.degenerate[c] = true;
            continue;
        }
        const auto it = std::max_element(ncc_sum.begin(), ncc_sum.end());
        result.delays[c] = static_cast<int>(std::distance(ncc_sum.begin(), it) - max_lag);
    }
    // An all-zero reference makes every channel degenerate.
    if (energy(ref) <= 0.0)
        std::fill(result.degenerate.begin(), result.degenerate.end(), true);
    return result;
}

AudioBuffer delay_sum_beamform(const std::vector<AudioBuffer>& channels,
                               const std::vector<int>& delays) {
    if (channels.empty()) throw std::invalid_argument("delay_sum_beamform: no channels");
    if (delays.size() != channels.size())
        throw std::invalid_argument("delay_sum_beamform: one delay per channel required");
    const std::size_t len = channels[0].size();
    const int rate = channels[0].sample_rate_hz;
    for (const auto& ch : channels) {
        validate(ch, "delay_sum_beamform channel");
        if (ch.size() != len || ch.sample_rate_hz != rate)
            throw std::invalid_argument("delay_sum_beamform: channels must share length and rate");
    }

    AudioBuffer out;
    out.sample_rate_hz = rate;
    out.samples.assign(len, 0.0);
    const double scale = 1.0 / static_cast<double>(channels.size());
    for (std::size_t c = 0; c < channels.size(); ++c) {
        const auto& sig = channels[c].samples;
        const long long d = delays[c];
        for (std::size_t i = 0; i < len; ++i) {
            const long long j = static_cast<long long>(i) + d;
            if (j >= 0 && j < static_cast<long long>(len))
                out.samples[i] += scale * sig[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

}  // namespace ambise
