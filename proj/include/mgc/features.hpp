#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mgc/audio.hpp"
#include "mgc/dsp.hpp"

namespace mgc {

/// One value per analysis frame.
struct FrameSeries {
    std::vector<double> values;
    std::string name;
};

/// Frequency band edges for spectral contrast; band b covers
/// [edges[b], edges[b+1]).
struct ContrastBands {
    std::vector<double> edges;

    static ContrastBands defaults(int sample_rate) {
        return ContrastBands{{0.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0,
                              sample_rate / 2.0}};
    }
    std::size_t count() const { return edges.size() - 1; }
};

constexpr std::size_t kNumMfcc = 20;
constexpr std::size_t kNumChroma = 12;
constexpr std::size_t kNumContrastBands = 7;
constexpr std::size_t kFeatureDim = 93;
constexpr std::size_t kTimeDomainFeatures = 9; // indices 0..8; the rest are spectral

/// Bumped whenever the canonical layout below changes. Serialized into model
/// files; loading a model trained against a different layout is an error.
extern const std::string kFeatureLayoutVersion;

/// Canonical per-clip feature vector. Layout (fixed order):
///   amp_mean, amp_std, amp_skew, amp_kurt,
///   zcr_mean, zcr_std, rmse_mean, rmse_std, tempo_bpm,
///   mfcc_mean[0..19], mfcc_std[0..19],
///   chroma_mean[0..11], chroma_std[0..11],
///   centroid_mean, centroid_std, bandwidth_mean, bandwidth_std,
///   contrast_mean[0..6], contrast_std[0..6],
///   rolloff_mean, rolloff_std
struct FeatureVector {
    std::array<double, kFeatureDim> values{};
};

/// The 93 canonical column names, index-aligned with FeatureVector.
const std::vector<std::string>& feature_names();

struct FeatureConfig {
    FrameParams frames{2048, 512};
    std::size_t n_mfcc = kNumMfcc;
    std::size_t n_mels_tempo = 96; // mel bands behind the onset envelope
    double rolloff_threshold = 0.85;
    double bandwidth_order = 2.0;
    double tempo_bpm_min = 30.0;
    double tempo_bpm_max = 300.0;
    double tempo_prior_bpm = 120.0;
};

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0; // excess
};

/// Population moments of the raw amplitudes. Skewness and kurtosis are 0 when
/// the clip is (numerically) constant.
Moments central_moments(const AudioClip& clip);

/// Per-frame sign-change count / frame_length, zero treated as positive.
FrameSeries zero_crossing_rate(const AudioClip& clip, const FrameParams& params);

/// Per-frame sqrt(mean(x^2)).
FrameSeries rmse(const AudioClip& clip, const FrameParams& params);

/// Positive spectral flux of the mel-dB spectrogram, one value per frame
/// transition: o(t) = sum_m max(0, dB(t,m) - dB(t-1,m)).
std::vector<double> onset_envelope(const Spectrogram& mel_db);

/// Tempo in BPM from the periodicity of an onset envelope sampled at
/// frames_per_second. Envelope is lightly smoothed, autocorrelated, candidates
/// weighted by a log-Gaussian prior centered at prior_bpm, and the winning
/// lag refined by parabolic interpolation (integer lags alone quantize BPM
/// too coarsely at hop 512). Returns 0 for a flat envelope.
double tempo_from_onsets(const std::vector<double>& envelope, double frames_per_second,
                         double bpm_min, double bpm_max, double prior_bpm);

/// Full tempo path: mel spectrogram -> dB -> onset flux -> tempo_from_onsets.
double tempo(const AudioClip& clip, const FeatureConfig& config);

/// MFCCs: power spectrogram -> n_mfcc-filter mel bank -> ln(energy + 1e-10)
/// -> orthonormal DCT-II, one row per frame.
Matrix mfcc(const AudioClip& clip, const FeatureConfig& config);
Matrix mfcc_from_power(const Spectrogram& power, const MelFilterbank& fb, std::size_t n_coeffs);

/// Per-frame energy in the 12 equal-tempered pitch classes (A4 = 440 Hz,
/// class 0 = C). Bins at or below 20 Hz are ignored; no per-frame
/// normalization.
Matrix chroma(const Spectrogram& power);

/// Energy-weighted mean frequency per frame; 0 on (near-)silent frames.
FrameSeries spectral_centroid(const Spectrogram& power);

/// p-th order weighted central moment about the centroid, per frame.
FrameSeries spectral_bandwidth(const Spectrogram& power, double p = 2.0);

/// Per-frame, per-band max(magnitude) - min(magnitude).
Matrix spectral_contrast(const Spectrogram& magnitude, const ContrastBands& bands);

/// Smallest frequency below which `threshold` of the frame energy lies;
/// 0 on silent frames. threshold must be in (0, 1].
FrameSeries spectral_rolloff(const Spectrogram& power, double threshold = 0.85);

/// Arithmetic mean and population standard deviation. Throws on empty input.
std::pair<double, double> aggregate(const std::vector<double>& series);

/// Assembles the canonical 93-entry vector from a clip that has already been
/// resampled and pre-emphasized. One STFT is shared by all spectral features.
FeatureVector extract(const AudioClip& clip, const FeatureConfig& config = {});

} // namespace mgc
