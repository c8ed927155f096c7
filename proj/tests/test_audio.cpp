#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mgc/audio.hpp"
#include "mgc/dsp.hpp"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"
#include "mgc/synth.hpp"
#include "mgc/wav.hpp"

using namespace mgc;

namespace {

void push_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
    v.push_back((x >> 16) & 0xFF);
    v.push_back((x >> 24) & 0xFF);
}

void push_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
}

void push_tag(std::vector<std::uint8_t>& v, const char* t) {
    v.insert(v.end(), t, t + 4);
}

// hand-built PCM16 WAV, possibly stereo, for decoder tests
std::vector<std::uint8_t> build_pcm16_wav(const std::vector<std::int16_t>& interleaved,
                                          std::uint16_t channels, std::uint32_t sample_rate) {
    std::vector<std::uint8_t> v;
    const std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size() * 2);
    push_tag(v, "RIFF");
    push_u32(v, 36 + data_size);
    push_tag(v, "WAVE");
    push_tag(v, "fmt ");
    push_u32(v, 16);
    push_u16(v, 1);
    push_u16(v, channels);
    push_u32(v, sample_rate);
    push_u32(v, sample_rate * 2 * channels);
    push_u16(v, static_cast<std::uint16_t>(2 * channels));
    push_u16(v, 16);
    push_tag(v, "data");
    push_u32(v, data_size);
    for (std::int16_t s : interleaved)
        push_u16(v, static_cast<std::uint16_t>(s));
    return v;
}

} // namespace

TEST_CASE("pcm16 sample scaling") {
    const auto clip = decode_wav(build_pcm16_wav({0, 16384, -32768}, 1, 22050));
    REQUIRE(clip.samples.size() == 3);
    CHECK(clip.sample_rate == 22050);
    CHECK(clip.samples[0] == doctest::Approx(0.0));
    CHECK(clip.samples[1] == doctest::Approx(0.5));
    CHECK(clip.samples[2] == doctest::Approx(-1.0));
}

TEST_CASE("stereo downmix by channel mean") {
    const auto clip = decode_wav(build_pcm16_wav({16384, -16384}, 2, 44100));
    REQUIRE(clip.samples.size() == 1);
    CHECK(clip.samples[0] == doctest::Approx(0.0));
}

TEST_CASE("pcm24 and float32 decoding") {
    std::vector<std::uint8_t> v;
    push_tag(v, "RIFF");
    push_u32(v, 36 + 6);
    push_tag(v, "WAVE");
    push_tag(v, "fmt ");
    push_u32(v, 16);
    push_u16(v, 1);
    push_u16(v, 1);
    push_u32(v, 8000);
    push_u32(v, 8000 * 3);
    push_u16(v, 3);
    push_u16(v, 24);
    push_tag(v, "data");
    push_u32(v, 6);
    // 0x400000 = 2^22 -> 0.5; 0x800000 sign-extends to -2^23 -> -1.0
    v.insert(v.end(), {0x00, 0x00, 0x40, 0x00, 0x00, 0x80});
    const auto clip24 = decode_wav(v);
    REQUIRE(clip24.samples.size() == 2);
    CHECK(clip24.samples[0] == doctest::Approx(0.5));
    CHECK(clip24.samples[1] == doctest::Approx(-1.0));

    std::vector<std::uint8_t> f;
    push_tag(f, "RIFF");
    push_u32(f, 36 + 4);
    push_tag(f, "WAVE");
    push_tag(f, "fmt ");
    push_u32(f, 16);
    push_u16(f, 3); // IEEE float
    push_u16(f, 1);
    push_u32(f, 8000);
    push_u32(f, 8000 * 4);
    push_u16(f, 4);
    push_u16(f, 32);
    push_tag(f, "data");
    push_u32(f, 4);
    const float value = -0.25f;
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(&value);
    f.insert(f.end(), bytes, bytes + 4);
    const auto clip32 = decode_wav(f);
    REQUIRE(clip32.samples.size() == 1);
    CHECK(clip32.samples[0] == doctest::Approx(-0.25));
}

TEST_CASE("malformed and unsupported wav streams") {
    CHECK_THROWS_AS(decode_wav({'R', 'I', 'F', 'X'}), format_error);
    CHECK_THROWS_AS(decode_wav({}), format_error);

    // format tag 2 (ADPCM) is a compressed codec
    std::vector<std::uint8_t> v;
    push_tag(v, "RIFF");
    push_u32(v, 36);
    push_tag(v, "WAVE");
    push_tag(v, "fmt ");
    push_u32(v, 16);
    push_u16(v, 2);
    push_u16(v, 1);
    push_u32(v, 8000);
    push_u32(v, 8000);
    push_u16(v, 1);
    push_u16(v, 4);
    push_tag(v, "data");
    push_u32(v, 0);
    CHECK_THROWS_AS(decode_wav(v), format_error);

    // truncated data chunk
    auto t = build_pcm16_wav({1, 2, 3}, 1, 8000);
    t.resize(t.size() - 2);
    CHECK_THROWS_AS(decode_wav(t), format_error);
}

TEST_CASE("encode/decode round-trip is lossless to 1 LSB") {
    Rng rng(99);
    AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples.resize(22050);
    for (double& s : clip.samples)
        s = rng.uniform(-1.0, 1.0);

    const auto decoded = decode_wav(encode_wav_pcm16(clip));
    REQUIRE(decoded.samples.size() == clip.samples.size());
    CHECK(decoded.sample_rate == clip.sample_rate);
    double max_err = 0.0;
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        max_err = std::max(max_err, std::abs(decoded.samples[i] - clip.samples[i]));
    CHECK(max_err <= 1.0 / 32768.0);
}

TEST_CASE("pre-emphasis") {
    AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples = {1.0, 1.0, 1.0};

    SUBCASE("direct substitution at alpha 0.97") {
        const auto y = pre_emphasis(clip, 0.97);
        REQUIRE(y.samples.size() == 3);
        CHECK(y.samples[0] == doctest::Approx(1.0));
        CHECK(y.samples[1] == doctest::Approx(0.03));
        CHECK(y.samples[2] == doctest::Approx(0.03));
    }
    SUBCASE("alpha 0 is the identity and length is preserved") {
        Rng rng(1);
        AudioClip random;
        random.sample_rate = 22050;
        random.samples.resize(1000);
        for (double& s : random.samples)
            s = rng.uniform(-1.0, 1.0);
        const auto y = pre_emphasis(random, 0.0);
        CHECK(y.samples == random.samples);
        const auto z = pre_emphasis(random, 0.5);
        CHECK(z.samples.size() == random.samples.size());
    }
    SUBCASE("alpha outside [0,1) rejected") {
        CHECK_THROWS_AS(pre_emphasis(clip, 1.0), param_error);
        CHECK_THROWS_AS(pre_emphasis(clip, -0.1), param_error);
    }
}

TEST_CASE("frame count arithmetic") {
    const FrameParams params{2048, 512};
    CHECK(frame_count(220500, params) == 427); // 10 s at 22050 Hz
    CHECK(frame_count(2048, params) == 1);
    CHECK(frame_count(2048 + 512 - 1, params) == 1); // tail dropped
    CHECK(frame_count(2048 + 512, params) == 2);

    SUBCASE("property: 1 + floor((N - frame)/hop) over random sizes") {
        Rng rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t frame = 16 + rng.bounded(512);
            const std::size_t hop = 1 + rng.bounded(frame);
            const std::size_t n = frame + rng.bounded(10000);
            const FrameParams p{frame, hop};
            CHECK(frame_count(n, p) == 1 + (n - frame) / hop);
        }
    }

    SUBCASE("too-short clip is an error") {
        AudioClip clip;
        clip.sample_rate = 22050;
        clip.samples.assign(2047, 0.1);
        CHECK_THROWS_AS(frame_signal(clip, params), param_error);
    }

    SUBCASE("frame i covers [i*hop, i*hop + frame_length)") {
        AudioClip clip;
        clip.sample_rate = 22050;
        clip.samples.resize(5000);
        for (std::size_t i = 0; i < clip.samples.size(); ++i)
            clip.samples[i] = static_cast<double>(i);
        const auto frames = frame_signal(clip, params);
        REQUIRE(frames.size() == frame_count(5000, params));
        for (std::size_t i = 0; i < frames.size(); ++i) {
            CHECK(frames[i].front() == doctest::Approx(static_cast<double>(i * 512)));
            CHECK(frames[i].back() == doctest::Approx(static_cast<double>(i * 512 + 2047)));
        }
    }
}

TEST_CASE("resampling") {
    SUBCASE("same rate returns the clip unchanged") {
        AudioClip clip;
        clip.sample_rate = 22050;
        clip.samples = {0.1, 0.2, 0.3};
        const auto out = resample(clip, 22050);
        CHECK(out.samples == clip.samples);
    }
    SUBCASE("DC level preserved within 1e-6") {
        AudioClip clip;
        clip.sample_rate = 44100;
        clip.samples.assign(44100, 0.25);
        const auto out = resample(clip, 22050);
        CHECK(out.samples.size() == 22050);
        for (std::size_t i = 0; i < out.samples.size(); i += 97)
            CHECK(out.samples[i] == doctest::Approx(0.25).epsilon(1e-6));
    }
    SUBCASE("output length is round(n * target / source)") {
        AudioClip clip;
        clip.sample_rate = 44100;
        clip.samples.assign(10000, 0.0);
        CHECK(resample(clip, 22050).samples.size() == 5000);
        CHECK(resample(clip, 16000).samples.size() == 3628); // round(10000*16000/44100)
    }
    SUBCASE("1 kHz tone lands in the same STFT bin after 44100 -> 22050") {
        SynthSpec spec;
        spec.kind = SynthKind::Sine;
        spec.frequency_hz = 1000.0;
        spec.amplitude = 0.5;
        spec.duration_s = 1.0;
        const AudioClip src = synthesize(spec, 44100);
        const AudioClip out = resample(src, 22050);
        REQUIRE(out.sample_rate == 22050);

        const auto spectrum = power_spectrogram(stft(out, StftParams{}));
        // expected bin: 1000 * 2048 / 22050 = 92.88 -> 93
        for (std::size_t f = 0; f < spectrum.frames(); ++f) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < spectrum.bins(); ++k)
                if (spectrum.values(f, k) > spectrum.values(f, best))
                    best = k;
            CHECK(best >= 92);
            CHECK(best <= 94);
        }
    }
}

TEST_CASE("synthesize") {
    SUBCASE("silence is all zeros") {
        SynthSpec spec;
        spec.kind = SynthKind::Silence;
        spec.duration_s = 1.0;
        const auto clip = synthesize(spec, 22050);
        REQUIRE(clip.samples.size() == 22050);
        for (double s : clip.samples)
            CHECK(s == 0.0);
    }
    SUBCASE("click train spacing at 120 BPM") {
        SynthSpec spec;
        spec.kind = SynthKind::ClickTrain;
        spec.bpm = 120.0;
        spec.duration_s = 10.0;
        const auto clip = synthesize(spec, 22050);
        CHECK(clip.samples[0] == doctest::Approx(1.0));
        CHECK(clip.samples[11025] == doctest::Approx(1.0));
        CHECK(clip.samples[22050] == doctest::Approx(1.0));
        std::size_t n_clicks = 0;
        for (double s : clip.samples)
            if (s != 0.0)
                ++n_clicks;
        CHECK(n_clicks == 20);
    }
    SUBCASE("same seed gives bit-identical clips") {
        SynthSpec spec;
        spec.kind = SynthKind::Noise;
        spec.amplitude = 0.5;
        spec.duration_s = 0.5;
        spec.seed = 1234;
        const auto a = synthesize(spec, 22050);
        const auto b = synthesize(spec, 22050);
        CHECK(a.samples == b.samples);
    }
    SUBCASE("tone at or above Nyquist rejected") {
        SynthSpec spec;
        spec.kind = SynthKind::Sine;
        spec.frequency_hz = 11025.0;
        CHECK_THROWS_AS(synthesize(spec, 22050), param_error);
    }
}
