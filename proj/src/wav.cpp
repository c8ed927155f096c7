#include "mgc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "mgc/error.hpp"

namespace mgc {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

struct ByteReader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    bool has(std::size_t n) const { return pos + n <= bytes.size(); }

    std::uint32_t u32() {
        if (!has(4))
            throw format_error("wav: truncated stream while reading u32");
        std::uint32_t v = static_cast<std::uint32_t>(bytes[pos]) |
                          static_cast<std::uint32_t>(bytes[pos + 1]) << 8 |
                          static_cast<std::uint32_t>(bytes[pos + 2]) << 16 |
                          static_cast<std::uint32_t>(bytes[pos + 3]) << 24;
        pos += 4;
        return v;
    }

    std::uint16_t u16() {
        if (!has(2))
            throw format_error("wav: truncated stream while reading u16");
        std::uint16_t v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }

    std::string tag() {
        if (!has(4))
            throw format_error("wav: truncated stream while reading chunk tag");
        std::string t(reinterpret_cast<const char*>(bytes.data() + pos), 4);
        pos += 4;
        return t;
    }
};

double decode_sample(const std::uint8_t* p, std::uint16_t format, std::uint16_t bits) {
    if (format == kFormatPcm && bits == 16) {
        const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        return v / 32768.0;
    }
    if (format == kFormatPcm && bits == 24) {
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000)
            v |= ~0xFFFFFF; // sign extend
        return v / 8388608.0;
    }
    // 32-bit IEEE float, no scaling.
    float f;
    std::memcpy(&f, p, 4);
    return static_cast<double>(f);
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void append_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

} // namespace

AudioClip decode_wav(const std::vector<std::uint8_t>& bytes) {
    ByteReader r{bytes};
    if (r.tag() != "RIFF")
        throw format_error("wav: missing RIFF tag");
    r.u32(); // riff size, not trusted
    if (r.tag() != "WAVE")
        throw format_error("wav: missing WAVE tag");

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    bool have_fmt = false;

    while (r.has(8)) {
        const std::string chunk = r.tag();
        const std::uint32_t size = r.u32();
        if (chunk == "fmt ") {
            if (size < 16)
                throw format_error("wav: fmt chunk too small");
            const std::size_t chunk_start = r.pos;
            format = r.u16();
            channels = r.u16();
            sample_rate = r.u32();
            r.u32(); // byte rate
            r.u16(); // block align
            bits = r.u16();
            r.pos = chunk_start + size + (size & 1);
            have_fmt = true;
        } else if (chunk == "data") {
            if (!have_fmt)
                throw format_error("wav: data chunk before fmt chunk");
            if (format != kFormatPcm && format != kFormatFloat)
                throw format_error("wav: unsupported codec (format tag " +
                                   std::to_string(format) + "), only PCM and IEEE float");
            if (format == kFormatPcm && bits != 16 && bits != 24)
                throw format_error("wav: unsupported PCM bit depth " + std::to_string(bits));
            if (format == kFormatFloat && bits != 32)
                throw format_error("wav: unsupported float bit depth " + std::to_string(bits));
            if (channels != 1 && channels != 2)
                throw format_error("wav: unsupported channel count " + std::to_string(channels));
            if (sample_rate == 0)
                throw format_error("wav: sample rate is zero");
            if (!r.has(size))
                throw format_error("wav: data chunk extends past end of stream");

            const std::size_t bytes_per_sample = bits / 8;
            const std::size_t stride = bytes_per_sample * channels;
            const std::size_t n_frames = size / stride;

            AudioClip clip;
            clip.sample_rate = static_cast<int>(sample_rate);
            clip.samples.resize(n_frames);
            const std::uint8_t* p = bytes.data() + r.pos;
            for (std::size_t i = 0; i < n_frames; ++i) {
                double acc = 0.0;
                for (std::uint16_t ch = 0; ch < channels; ++ch)
                    acc += decode_sample(p + i * stride + ch * bytes_per_sample, format, bits);
                clip.samples[i] = acc / channels;
            }
            return clip;
        } else {
            // skip unknown chunk, word aligned
            const std::size_t skip = size + (size & 1);
            if (!r.has(skip))
                throw format_error("wav: chunk '" + chunk + "' extends past end of stream");
            r.pos += skip;
        }
    }
    throw format_error(have_fmt ? "wav: no data chunk" : "wav: no fmt chunk");
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioClip& clip) {
    validate_clip(clip);
    const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * 2);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_size);
    append_tag(out, "RIFF");
    append_u32(out, 36 + data_size);
    append_tag(out, "WAVE");
    append_tag(out, "fmt ");
    append_u32(out, 16);
    append_u16(out, kFormatPcm);
    append_u16(out, 1); // mono
    append_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    append_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
    append_u16(out, 2);  // block align
    append_u16(out, 16); // bits
    append_tag(out, "data");
    append_u32(out, data_size);
    for (double s : clip.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const long code = std::lround(clamped * 32768.0);
        const std::int16_t v = static_cast<std::int16_t>(std::clamp(code, -32768L, 32767L));
        append_u16(out, static_cast<std::uint16_t>(v));
    }
    return out;
}

AudioClip read_wav_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open wav file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_wav(bytes);
}

void write_wav_file(const std::string& path, const AudioClip& clip) {
    const std::vector<std::uint8_t> bytes = encode_wav_pcm16(clip);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open wav file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw io_error("failed writing wav file: " + path);
}

} // namespace mgc
