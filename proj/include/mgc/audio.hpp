#pragma once

#include <cstddef>
#include <vector>

namespace mgc {

/// Mono audio buffer. Samples are dimensionless amplitudes, nominal range
/// [-1, 1], all finite.
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;

    std::size_t size() const { return samples.size(); }
    double duration_seconds() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

/// Analysis framing shared by every frame-based feature.
struct FrameParams {
    std::size_t frame_length = 2048;
    std::size_t hop_length = 512;
};

/// Throws param_error if the clip violates its invariants (empty, bad rate,
/// non-finite samples).
void validate_clip(const AudioClip& clip);

/// First-order high-pass difference filter: y(0) = x(0),
/// y(t) = x(t) - alpha * x(t-1). alpha in [0, 1).
AudioClip pre_emphasis(const AudioClip& clip, double alpha);

/// Number of full frames for a signal of n samples. Tail samples that do not
/// fill a frame are dropped; no padding.
std::size_t frame_count(std::size_t n, const FrameParams& params);

/// Splits the clip into frames of frame_length samples every hop_length
/// samples. Frame i covers [i*hop, i*hop + frame_length). Throws param_error
/// if the clip is shorter than one frame.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, const FrameParams& params);

/// Band-limited sample rate conversion (windowed sinc, Kaiser beta 8.6,
/// 16 zero crossings per side, per-phase tap normalization so DC is
/// preserved exactly). Returns the clip unchanged when rates already match.
/// Output length is round(n * target_sr / source_sr).
AudioClip resample(const AudioClip& clip, int target_sr);

} // namespace mgc
