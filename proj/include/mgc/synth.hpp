#pragma once

#include <cstdint>

#include "mgc/audio.hpp"

namespace mgc {

enum class SynthKind { Sine, ClickTrain, Noise, Chirp, Silence, Mixture };

/// Recipe for one deterministic synthetic clip. Fields are kind-specific:
///   Sine       - frequency_hz, amplitude
///   ClickTrain - bpm, amplitude (unit impulses every 60/bpm seconds)
///   Noise      - amplitude, lowpass_hz (0 = white)
///   Chirp      - frequency_hz -> frequency_end_hz linear sweep, amplitude
///   Mixture    - sine (frequency_hz, amplitude) + clicks (bpm, click_amplitude)
struct SynthSpec {
    SynthKind kind = SynthKind::Silence;
    double duration_s = 10.0;
    double frequency_hz = 440.0;
    double frequency_end_hz = 440.0;
    double amplitude = 0.5;
    double bpm = 120.0;
    double click_amplitude = 1.0;
    double lowpass_hz = 0.0;
    std::uint64_t seed = 0;
};

/// Renders the spec at the given rate. Deterministic in (spec, seed). Tonal
/// kinds with a frequency at or above Nyquist throw param_error.
AudioClip synthesize(const SynthSpec& spec, int sample_rate);

} // namespace mgc
