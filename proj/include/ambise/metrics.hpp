// metrics.hpp -- objective scores: short-time intelligibility and
// inter-channel level/phase deviation.
#pragma once

#include <cstddef>
#include <vector>

#include "ambise/audio.hpp"
#include "ambise/scene.hpp"
#include "ambise/stft.hpp"

namespace ambise {

struct StoiScore {
    double value = 0.0;  // typically in (0, 1]; reported as computed, unclamped
};

struct SpatialDeviation {
    double icld_rms_db = 0.0;
    double icpd_rms_rad = 0.0;
    std::size_t active_bin_count = 0;
};

/// Short-time objective intelligibility of degraded against clean.
///
/// Both signals are trimmed to the shorter, resampled to 10 kHz, stripped of
/// frames more than 40 dB below the clean signal's loudest frame (256-sample
/// frames, 50% overlap), analyzed with a 256/128 Hann STFT zero-padded to
/// 512, grouped into 15 one-third-octave bands from 150 Hz, and compared by
/// normalized correlation over 30-frame segments with the degraded vector
/// clipped at -15 dB signal-to-distortion. The score is the mean of all
/// band/segment correlations.
StoiScore stoi(const AudioBuffer& clean, const AudioBuffer& degraded);

/// RMS change of inter-channel level and phase differences between two
/// scenes, over every unordered channel pair and every time-frequency bin
/// whose four magnitudes all clear floor_dbfs.
SpatialDeviation icld_icpd_deviation(const BFormatScene& before, const BFormatScene& after,
                                     const StftConfig& config, double floor_dbfs = -80.0);

/// Same comparison on time-frequency representations directly (one
/// spectrogram per channel, matching shapes). This is where mask-based
/// enhancement acts, so its preservation guarantees are exact here;
/// comparing resynthesized waveforms adds overlap-add consistency error on
/// top.
SpatialDeviation icld_icpd_deviation(const std::vector<Spectrogram>& before,
                                     const std::vector<Spectrogram>& after,
                                     double floor_dbfs = -80.0);

}  // namespace ambise
