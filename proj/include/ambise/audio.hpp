// audio.hpp -- mono sample buffer, the basic currency of the toolkit.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ambise {

/// A mono sampled signal. Samples are dimensionless amplitudes, nominally
/// in [-1, 1]; all internal math is double precision.
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate_hz = 0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Throws std::invalid_argument unless the buffer is non-empty, has a
/// positive rate and contains only finite samples.
inline void validate(const AudioBuffer& buf, const std::string& what = "signal") {
    if (buf.sample_rate_hz <= 0)
        throw std::invalid_argument(what + ": sample rate must be positive");
    if (buf.samples.empty())
        throw std::invalid_argument(what + ": empty signal");
    if (!all_finite(buf.samples))
        throw std::invalid_argument(what + ": non-finite samples");
}

inline double energy(const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

inline double rms(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::sqrt(energy(v) / static_cast<double>(v.size()));
}

}  // namespace ambise
