// doa.hpp -- direction-of-arrival estimation and angular error arithmetic.
#pragma once

#include <utility>

#include "ambise/audio.hpp"
#include "ambise/scene.hpp"
#include "ambise/stft.hpp"

namespace ambise {

struct DoaEstimate {
    Direction direction;
    double confidence = 0.0;  // |mean intensity| / total |W|^2 over the band
};

/// Signed separations, est minus truth. d_azimuth wrapped to (-180, 180].
struct AngularError {
    double d_azimuth_deg = 0.0;
    double d_elevation_deg = 0.0;
    double great_circle_deg = 0.0;
};

struct FrequencyBand {
    double lo_hz = 200.0;
    double hi_hz = 6000.0;
};

/// Utterance-level DOA from the acoustic intensity Re{conj(W) * (X, Y, Z)}
/// summed over the band and all frames. Throws when the scene carries no
/// usable intensity (silence).
DoaEstimate pseudo_intensity_doa(const BFormatScene& scene, const StftConfig& config,
                                 const FrequencyBand& band = {});

/// PHAT-weighted generalized cross-correlation: returns the sub-sample
/// delay of b relative to a in seconds (positive when b lags a) and the
/// correlation peak value.
std::pair<double, double> gcc_phat(const AudioBuffer& a, const AudioBuffer& b, double max_lag_s);

AngularError angular_error(const Direction& est, const Direction& truth);

}  // namespace ambise
