#include "mgc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_tone_frequency(double f, int sample_rate) {
    if (f <= 0.0 || f >= sample_rate / 2.0)
        throw param_error("tone frequency " + std::to_string(f) +
                          " Hz must lie below Nyquist (" +
                          std::to_string(sample_rate / 2.0) + " Hz)");
}

void add_sine(std::vector<double>& samples, double freq, double amp, int sr) {
    for (std::size_t t = 0; t < samples.size(); ++t)
        samples[t] += amp * std::sin(kTwoPi * freq * t / sr);
}

void add_clicks(std::vector<double>& samples, double bpm, double amp, int sr) {
    const double step = 60.0 / bpm * sr;
    for (std::size_t k = 0;; ++k) {
        const double pos = static_cast<double>(k) * step;
        const std::size_t idx = static_cast<std::size_t>(std::llround(pos));
        if (idx >= samples.size())
            break;
        samples[idx] += amp;
    }
}

// Two cascaded one-pole lowpass passes; crude but enough to move the
// spectral centroid of noise well below the white-noise value.
void one_pole_lowpass(std::vector<double>& samples, double cutoff_hz, int sr) {
    const double a = 1.0 - std::exp(-kTwoPi * cutoff_hz / sr);
    for (int pass = 0; pass < 2; ++pass) {
        double y = 0.0;
        for (double& s : samples) {
            y += a * (s - y);
            s = y;
        }
    }
}

} // namespace

AudioClip synthesize(const SynthSpec& spec, int sample_rate) {
    if (sample_rate <= 0)
        throw param_error("sample rate must be positive");
    if (spec.duration_s <= 0.0)
        throw param_error("duration must be positive, got " + std::to_string(spec.duration_s));

    const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples.assign(n, 0.0);

    switch (spec.kind) {
    case SynthKind::Silence:
        break;
    case SynthKind::Sine:
        check_tone_frequency(spec.frequency_hz, sample_rate);
        add_sine(clip.samples, spec.frequency_hz, spec.amplitude, sample_rate);
        break;
    case SynthKind::ClickTrain:
        if (spec.bpm <= 0.0)
            throw param_error("click train bpm must be positive");
        add_clicks(clip.samples, spec.bpm, spec.click_amplitude, sample_rate);
        break;
    case SynthKind::Noise: {
        Rng rng(spec.seed);
        for (double& s : clip.samples)
            s = rng.uniform(-spec.amplitude, spec.amplitude);
        if (spec.lowpass_hz > 0.0) {
            one_pole_lowpass(clip.samples, spec.lowpass_hz, sample_rate);
            // restore peak level after filtering
            double peak = 0.0;
            for (double s : clip.samples)
                peak = std::max(peak, std::abs(s));
            if (peak > 0.0) {
                const double gain = spec.amplitude / peak;
                for (double& s : clip.samples)
                    s *= gain;
            }
        }
        break;
    }
    case SynthKind::Chirp: {
        check_tone_frequency(spec.frequency_hz, sample_rate);
        check_tone_frequency(spec.frequency_end_hz, sample_rate);
        const double f0 = spec.frequency_hz;
        const double df = spec.frequency_end_hz - spec.frequency_hz;
        const double total = spec.duration_s;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate;
            const double phase = kTwoPi * (f0 * t + 0.5 * df * t * t / total);
            clip.samples[i] = spec.amplitude * std::sin(phase);
        }
        break;
    }
    case SynthKind::Mixture:
        check_tone_frequency(spec.frequency_hz, sample_rate);
        if (spec.bpm <= 0.0)
            throw param_error("mixture bpm must be positive");
        add_sine(clip.samples, spec.frequency_hz, spec.amplitude, sample_rate);
        add_clicks(clip.samples, spec.bpm, spec.click_amplitude, sample_rate);
        for (double& s : clip.samples)
            s = std::clamp(s, -1.0, 1.0);
        break;
    }
    return clip;
}

} // namespace mgc
