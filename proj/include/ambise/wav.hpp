// wav.hpp -- RIFF/WAVE reader and writer (PCM16, IEEE float32).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambise/audio.hpp"

namespace ambise {

class WavError : public std::runtime_error {
public:
    explicit WavError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class WavFormat { pcm16, float32 };

struct WavInfo {
    int channels = 0;
    int sample_rate_hz = 0;
    std::uint64_t frames = 0;
    WavFormat format = WavFormat::pcm16;
};

/// Header-only read: format and geometry without loading sample data.
WavInfo probe_wav(const std::string& path);

/// Reads all channels. 16-bit PCM maps sample/32768.0; float32 is passed
/// through as-is.
std::vector<AudioBuffer> read_wav(const std::string& path);

/// Writes interleaved little-endian RIFF/WAVE. PCM16 quantizes with
/// round-half-away-from-zero and clamps to [-32768, 32767]. All channels
/// must share length and rate.
void write_wav(const std::string& path, const std::vector<AudioBuffer>& channels,
               WavFormat format = WavFormat::pcm16);

}  // namespace ambise
