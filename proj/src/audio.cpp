#include "mgc/audio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgc/error.hpp"

namespace mgc {

void validate_clip(const AudioClip& clip) {
    if (clip.samples.empty())
        throw param_error("audio clip has no samples");
    if (clip.sample_rate <= 0)
        throw param_error("audio clip sample rate must be positive, got " +
                          std::to_string(clip.sample_rate));
    for (double s : clip.samples)
        if (!std::isfinite(s))
            throw param_error("audio clip contains a non-finite sample");
}

AudioClip pre_emphasis(const AudioClip& clip, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw param_error("pre-emphasis alpha must be in [0, 1), got " + std::to_string(alpha));
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.samples.resize(clip.samples.size());
    if (clip.samples.empty())
        return out;
    out.samples[0] = clip.samples[0];
    for (std::size_t t = 1; t < clip.samples.size(); ++t)
        out.samples[t] = clip.samples[t] - alpha * clip.samples[t - 1];
    return out;
}

std::size_t frame_count(std::size_t n, const FrameParams& params) {
    if (params.hop_length == 0 || params.hop_length > params.frame_length)
        throw param_error("frame params require 0 < hop <= frame_length");
    if (n < params.frame_length)
        return 0;
    return 1 + (n - params.frame_length) / params.hop_length;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FrameParams& params) {
    const std::size_t count = frame_count(clip.samples.size(), params);
    if (count == 0)
        throw param_error("clip of " + std::to_string(clip.samples.size()) +
                          " samples is shorter than one frame (" +
                          std::to_string(params.frame_length) + ")");
    std::vector<std::vector<double>> frames(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double* begin = clip.samples.data() + i * params.hop_length;
        frames[i].assign(begin, begin + params.frame_length);
    }
    return frames;
}

namespace {

// Zeroth-order modified Bessel function of the first kind, power series.
double bessel_i0(double x) {
    double sum = 1.0;
    double term = 1.0;
    const double half_x = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half_x / k) * (half_x / k);
        sum += term;
        if (term < 1e-18 * sum)
            break;
    }
    return sum;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12)
        return 1.0;
    const double px = 3.14159265358979323846 * x;
    return std::sin(px) / px;
}

} // namespace

AudioClip resample(const AudioClip& clip, int target_sr) {
    validate_clip(clip);
    if (target_sr <= 0)
        throw param_error("target sample rate must be positive");
    if (target_sr == clip.sample_rate)
        return clip;

    constexpr double kKaiserBeta = 8.6;
    constexpr int kZeroCrossings = 16;
    const double i0_beta = bessel_i0(kKaiserBeta);

    const double ratio = static_cast<double>(clip.sample_rate) / target_sr;
    // Anti-alias cutoff relative to the source Nyquist; < 1 only when
    // downsampling.
    const double scale = std::min(1.0, static_cast<double>(target_sr) / clip.sample_rate);
    const double half_width = kZeroCrossings / scale;

    const std::size_t n_in = clip.samples.size();
    const std::size_t n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_in) * target_sr / clip.sample_rate));

    AudioClip out;
    out.sample_rate = target_sr;
    out.samples.resize(n_out, 0.0);

    for (std::size_t j = 0; j < n_out; ++j) {
        const double t = j * ratio;
        const long long lo = static_cast<long long>(std::ceil(t - half_width));
        const long long hi = static_cast<long long>(std::floor(t + half_width));
        double acc = 0.0;
        double weight_sum = 0.0;
        for (long long i = std::max(0LL, lo);
             i <= std::min(hi, static_cast<long long>(n_in) - 1); ++i) {
            const double d = (t - i) * scale;
            const double r = d / kZeroCrossings;
            if (r <= -1.0 || r >= 1.0)
                continue;
            const double w = sinc(d) * bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
            acc += clip.samples[static_cast<std::size_t>(i)] * w;
            weight_sum += w;
        }
        out.samples[j] = weight_sum != 0.0 ? acc / weight_sum : 0.0;
    }
    return out;
}

} // namespace mgc
