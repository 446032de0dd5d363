#include "ambise/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace ambise {

namespace {

constexpr std::uint16_t kTagPcm = 0x0001;
constexpr std::uint16_t kTagIeeeFloat = 0x0003;

struct FmtChunk {
    std::uint16_t format_tag = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
};

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct ParsedWav {
    FmtChunk fmt;
    std::vector<unsigned char> data;
    bool data_loaded = false;
    std::uint64_t data_bytes = 0;
};

ParsedWav parse(const std::string& path, bool load_data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError(path + ": cannot open file");

    unsigned char riff[12];
    if (!in.read(reinterpret_cast<char*>(riff), 12))
        throw WavError(path + ": missing 'RIFF' header");
    if (std::memcmp(riff, "RIFF", 4) != 0)
        throw WavError(path + ": missing 'RIFF' header");
    if (std::memcmp(riff + 8, "WAVE", 4) != 0)
        throw WavError(path + ": missing 'WAVE' tag");

    ParsedWav wav;
    bool have_fmt = false;
    bool have_data = false;
    unsigned char hdr[8];
    while (in.read(reinterpret_cast<char*>(hdr), 8)) {
        const std::uint32_t size = read_u32(hdr + 4);
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (size < 16) throw WavError(path + ": truncated 'fmt ' chunk");
            std::vector<unsigned char> body(size);
            if (!in.read(reinterpret_cast<char*>(body.data()), size))
                throw WavError(path + ": truncated 'fmt ' chunk");
            wav.fmt.format_tag = read_u16(body.data());
            wav.fmt.channels = read_u16(body.data() + 2);
            wav.fmt.sample_rate = read_u32(body.data() + 4);
            wav.fmt.bits_per_sample = read_u16(body.data() + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (!have_fmt) throw WavError(path + ": missing 'fmt ' chunk");
            wav.data_bytes = size;
            have_data = true;
            if (load_data) {
                wav.data.resize(size);
                if (!in.read(reinterpret_cast<char*>(wav.data.data()),
                             static_cast<std::streamsize>(size)))
                    throw WavError(path + ": truncated 'data' chunk");
                wav.data_loaded = true;
            }
            break;
        } else {
            // Skip unknown chunks (LIST, fact, ...), honoring RIFF padding.
            in.seekg(size + (size & 1), std::ios::cur);
        }
    }
    if (!have_fmt) throw WavError(path + ": missing 'fmt ' chunk");
    if (!have_data) throw WavError(path + ": missing 'data' chunk");

    if (wav.fmt.channels == 0) throw WavError(path + ": channel count is zero");
    if (wav.fmt.sample_rate == 0) throw WavError(path + ": sample rate is zero");
    const bool pcm16 = wav.fmt.format_tag == kTagPcm && wav.fmt.bits_per_sample == 16;
    const bool f32 = wav.fmt.format_tag == kTagIeeeFloat && wav.fmt.bits_per_sample == 32;
    if (!pcm16 && !f32)
        throw WavError(path + ": unsupported codec (format tag " +
                       std::to_string(wav.fmt.format_tag) + ", " +
                       std::to_string(wav.fmt.bits_per_sample) + " bits)");
    return wav;
}

}  // namespace

WavInfo probe_wav(const std::string& path) {
    ParsedWav wav = parse(path, false);
    WavInfo info;
    info.channels = wav.fmt.channels;
    info.sample_rate_hz = static_cast<int>(wav.fmt.sample_rate);
    info.format = wav.fmt.bits_per_sample == 16 ? WavFormat::pcm16 : WavFormat::float32;
    const std::uint32_t frame_bytes = wav.fmt.channels * (wav.fmt.bits_per_sample / 8u);
    info.frames = wav.data_bytes / frame_bytes;
    return info;
}

std::vector<AudioBuffer> read_wav(const std::string& path) {
    ParsedWav wav = parse(path, true);
    const int channels = wav.fmt.channels;
    const std::uint32_t bytes_per_sample = wav.fmt.bits_per_sample / 8u;
    const std::uint64_t frames = wav.data.size() / (static_cast<std::uint64_t>(channels) * bytes_per_sample);

    std::vector<AudioBuffer> out(static_cast<std::size_t>(channels));
    for (auto& ch : out) {
        ch.sample_rate_hz = static_cast<int>(wav.fmt.sample_rate);
        ch.samples.resize(static_cast<std::size_t>(frames));
    }
    const unsigned char* p = wav.data.data();
    for (std::uint64_t f = 0; f < frames; ++f) {
        for (int c = 0; c < channels; ++c) {
            if (wav.fmt.bits_per_sample == 16) {
                const auto raw = static_cast<std::int16_t>(read_u16(p));
                out[static_cast<std::size_t>(c)].samples[static_cast<std::size_t>(f)] =
                    static_cast<double>(raw) / 32768.0;
                p += 2;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                out[static_cast<std::size_t>(c)].samples[static_cast<std::size_t>(f)] =
                    static_cast<double>(v);
                p += 4;
            }
        }
    }
    return out;
}

void write_wav(const std::string& path, const std::vector<AudioBuffer>& channels,
               WavFormat format) {
    if (channels.empty()) throw WavError(path + ": no channels to write");
    const std::size_t frames = channels[0].size();
    const int rate = channels[0].sample_rate_hz;
    if (rate <= 0) throw WavError(path + ": sample rate must be positive");
    for (const auto& ch : channels)
        if (ch.size() != frames || ch.sample_rate_hz != rate)
            throw WavError(path + ": channels must share length and sample rate");

    const std::uint16_t nch = static_cast<std::uint16_t>(channels.size());
    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint16_t block_align = static_cast<std::uint16_t>(nch * bits / 8);
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * block_align);

    std::string body;
    body.reserve(44 + data_bytes);
    body += "RIFF";
    put_u32(body, 36 + data_bytes);
    body += "WAVE";
    body += "fmt ";
    put_u32(body, 16);
    put_u16(body, format == WavFormat::pcm16 ? kTagPcm : kTagIeeeFloat);
    put_u16(body, nch);
    put_u32(body, static_cast<std::uint32_t>(rate));
    put_u32(body, static_cast<std::uint32_t>(rate) * block_align);
    put_u16(body, block_align);
    put_u16(body, bits);
    body += "data";
    put_u32(body, data_bytes);

    for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t c = 0; c < channels.size(); ++c) {
            const double x = channels[c].samples[f];
            if (format == WavFormat::pcm16) {
                double q = std::round(x * 32768.0);  // round halves away from zero
                q = std::min(32767.0, std::max(-32768.0, q));
                put_u16(body, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
            } else {
                const float v = static_cast<float>(x);
                std::uint32_t raw;
                std::memcpy(&raw, &v, 4);
                put_u32(body, raw);
            }
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw WavError(path + ": cannot open for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw WavError(path + ": write failed");
}

}  // namespace ambise
