#include "mgc/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgc/error.hpp"

namespace mgc {

const std::string kFeatureLayoutVersion = "93.v1";

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        n.reserve(kFeatureDim);
        n.insert(n.end(), {"amp_mean", "amp_std", "amp_skew", "amp_kurt"});
        n.insert(n.end(), {"zcr_mean", "zcr_std", "rmse_mean", "rmse_std", "tempo_bpm"});
        for (std::size_t i = 0; i < kNumMfcc; ++i)
            n.push_back("mfcc_mean_" + std::to_string(i));
        for (std::size_t i = 0; i < kNumMfcc; ++i)
            n.push_back("mfcc_std_" + std::to_string(i));
        for (std::size_t i = 0; i < kNumChroma; ++i)
            n.push_back("chroma_mean_" + std::to_string(i));
        for (std::size_t i = 0; i < kNumChroma; ++i)
            n.push_back("chroma_std_" + std::to_string(i));
        n.insert(n.end(), {"centroid_mean", "centroid_std", "bandwidth_mean", "bandwidth_std"});
        for (std::size_t i = 0; i < kNumContrastBands; ++i)
            n.push_back("contrast_mean_" + std::to_string(i));
        for (std::size_t i = 0; i < kNumContrastBands; ++i)
            n.push_back("contrast_std_" + std::to_string(i));
        n.insert(n.end(), {"rolloff_mean", "rolloff_std"});
        return n;
    }();
    return names;
}

Moments central_moments(const AudioClip& clip) {
    if (clip.samples.empty())
        throw param_error("central_moments: empty clip");
    const double n = static_cast<double>(clip.samples.size());
    const double mean = std::accumulate(clip.samples.begin(), clip.samples.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double s : clip.samples) {
        const double d = s - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    Moments out;
    out.mean = mean;
    out.stddev = std::sqrt(m2);
    if (out.stddev < 1e-12) {
        out.skewness = 0.0;
        out.kurtosis = 0.0;
    } else {
        out.skewness = m3 / (out.stddev * out.stddev * out.stddev);
        out.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

FrameSeries zero_crossing_rate(const AudioClip& clip, const FrameParams& params) {
    const auto frames = frame_signal(clip, params);
    FrameSeries out;
    out.name = "zcr";
    out.values.reserve(frames.size());
    for (const auto& frame : frames) {
        std::size_t crossings = 0;
        for (std::size_t i = 1; i < frame.size(); ++i) {
            const bool prev_pos = frame[i - 1] >= 0.0;
            const bool cur_pos = frame[i] >= 0.0;
            if (prev_pos != cur_pos)
                ++crossings;
        }
        out.values.push_back(static_cast<double>(crossings) /
                             static_cast<double>(params.frame_length));
    }
    return out;
}

FrameSeries rmse(const AudioClip& clip, const FrameParams& params) {
    const auto frames = frame_signal(clip, params);
    FrameSeries out;
    out.name = "rmse";
    out.values.reserve(frames.size());
    for (const auto& frame : frames) {
        double acc = 0.0;
        for (double s : frame)
            acc += s * s;
        out.values.push_back(std::sqrt(acc / static_cast<double>(frame.size())));
    }
    return out;
}

std::vector<double> onset_envelope(const Spectrogram& mel_db) {
    if (mel_db.frames() < 2)
        throw param_error("onset envelope needs at least 2 frames");
    std::vector<double> envelope(mel_db.frames() - 1, 0.0);
    for (std::size_t t = 1; t < mel_db.frames(); ++t) {
        double flux = 0.0;
        for (std::size_t m = 0; m < mel_db.bins(); ++m)
            flux += std::max(0.0, mel_db.values(t, m) - mel_db.values(t - 1, m));
        envelope[t - 1] = flux;
    }
    return envelope;
}

double tempo_from_onsets(const std::vector<double>& envelope, double frames_per_second,
                         double bpm_min, double bpm_max, double prior_bpm) {
    const bool all_zero =
        std::all_of(envelope.begin(), envelope.end(), [](double v) { return v == 0.0; });
    if (envelope.size() < 4 || all_zero)
        return 0.0;

    // Light smoothing spreads each onset across neighbouring frames so the
    // fundamental peak is not split between two adjacent lags when the beat
    // period is a non-integer number of frames.
    std::vector<double> smooth(envelope.size());
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        const double prev = i > 0 ? envelope[i - 1] : 0.0;
        const double next = i + 1 < envelope.size() ? envelope[i + 1] : 0.0;
        smooth[i] = 0.25 * prev + 0.5 * envelope[i] + 0.25 * next;
    }

    std::vector<double> ac(smooth.size(), 0.0);
    for (std::size_t lag = 0; lag < smooth.size(); ++lag) {
        double acc = 0.0;
        for (std::size_t t = 0; t + lag < smooth.size(); ++t)
            acc += smooth[t] * smooth[t + lag];
        ac[lag] = acc;
    }

    const auto bpm_of = [&](double lag) { return 60.0 * frames_per_second / lag; };
    const auto prior = [&](double bpm) {
        const double octaves = std::log2(bpm / prior_bpm);
        return std::exp(-0.5 * octaves * octaves);
    };

    const std::size_t lag_min = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(60.0 * frames_per_second / bpm_max)));
    const std::size_t lag_max = std::min(
        ac.size() - 1,
        static_cast<std::size_t>(std::floor(60.0 * frames_per_second / bpm_min)));
    if (lag_min > lag_max)
        return 0.0;

    std::vector<double> score(ac.size(), 0.0);
    std::size_t best = lag_min;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
        score[lag] = ac[lag] * prior(bpm_of(static_cast<double>(lag)));
        if (score[lag] > score[best])
            best = lag;
    }
    if (score[best] <= 0.0)
        return 0.0;

    double refined = static_cast<double>(best);
    if (best > 0 && best + 1 < score.size()) {
        const double s0 = score[best - 1], s1 = score[best], s2 = score[best + 1];
        const double denom = s0 - 2.0 * s1 + s2;
        if (denom < 0.0) {
            const double delta = std::clamp(0.5 * (s0 - s2) / denom, -0.5, 0.5);
            refined += delta;
        }
    }
    return std::clamp(bpm_of(refined), bpm_min, bpm_max);
}

double tempo(const AudioClip& clip, const FeatureConfig& config) {
    const StftParams params{config.frames.frame_length, config.frames.hop_length};
    const MelFilterbank fb = mel_filterbank(clip.sample_rate, params.n_fft,
                                            config.n_mels_tempo, 0.0, clip.sample_rate / 2.0);
    const Spectrogram mel_db = power_to_db(mel_spectrogram(clip, params, fb));
    if (mel_db.frames() < 2)
        throw param_error("tempo needs at least 2 mel frames");
    const double fps = static_cast<double>(clip.sample_rate) / static_cast<double>(params.hop);
    return tempo_from_onsets(onset_envelope(mel_db), fps, config.tempo_bpm_min,
                             config.tempo_bpm_max, config.tempo_prior_bpm);
}

Matrix mfcc_from_power(const Spectrogram& power, const MelFilterbank& fb,
                       std::size_t n_coeffs) {
    const Spectrogram mel = apply_filterbank(power, fb);
    Matrix log_energies(mel.frames(), mel.bins());
    for (std::size_t f = 0; f < mel.frames(); ++f)
        for (std::size_t m = 0; m < mel.bins(); ++m)
            log_energies(f, m) = std::log(mel.values(f, m) + 1e-10);
    return dct_ii(log_energies, n_coeffs);
}

Matrix mfcc(const AudioClip& clip, const FeatureConfig& config) {
    const StftParams params{config.frames.frame_length, config.frames.hop_length};
    const MelFilterbank fb = mel_filterbank(clip.sample_rate, params.n_fft, config.n_mfcc,
                                            0.0, clip.sample_rate / 2.0);
    return mfcc_from_power(power_spectrogram(stft(clip, params)), fb, config.n_mfcc);
}

Matrix chroma(const Spectrogram& power) {
    Matrix out(power.frames(), kNumChroma);
    for (std::size_t k = 0; k < power.bins(); ++k) {
        const double f = power.bin_frequencies[k];
        if (f <= 20.0)
            continue;
        const long midi = std::lround(12.0 * std::log2(f / 440.0) + 69.0);
        const std::size_t pitch_class = static_cast<std::size_t>(((midi % 12) + 12) % 12);
        for (std::size_t t = 0; t < power.frames(); ++t)
            out(t, pitch_class) += power.values(t, k);
    }
    return out;
}

FrameSeries spectral_centroid(const Spectrogram& power) {
    FrameSeries out;
    out.name = "centroid";
    out.values.resize(power.frames(), 0.0);
    for (std::size_t t = 0; t < power.frames(); ++t) {
        double total = 0.0, weighted = 0.0;
        for (std::size_t k = 0; k < power.bins(); ++k) {
            total += power.values(t, k);
            weighted += power.values(t, k) * power.bin_frequencies[k];
        }
        out.values[t] = total < 1e-12 ? 0.0 : weighted / total;
    }
    return out;
}

FrameSeries spectral_bandwidth(const Spectrogram& power, double p) {
    const FrameSeries centroid = spectral_centroid(power);
    FrameSeries out;
    out.name = "bandwidth";
    out.values.resize(power.frames(), 0.0);
    for (std::size_t t = 0; t < power.frames(); ++t) {
        double total = 0.0, moment = 0.0;
        for (std::size_t k = 0; k < power.bins(); ++k) {
            total += power.values(t, k);
            moment += power.values(t, k) *
                      std::pow(std::abs(power.bin_frequencies[k] - centroid.values[t]), p);
        }
        out.values[t] = total < 1e-12 ? 0.0 : std::pow(moment / total, 1.0 / p);
    }
    return out;
}

Matrix spectral_contrast(const Spectrogram& magnitude, const ContrastBands& bands) {
    if (magnitude.scale != SpectrogramScale::Magnitude)
        throw param_error("spectral_contrast expects a magnitude-scale spectrogram");
    const std::size_t n_bands = bands.count();
    Matrix out(magnitude.frames(), n_bands);
    for (std::size_t b = 0; b < n_bands; ++b) {
        // bins with edges[b] <= f < edges[b+1]
        std::vector<std::size_t> bin_idx;
        for (std::size_t k = 0; k < magnitude.bins(); ++k)
            if (magnitude.bin_frequencies[k] >= bands.edges[b] &&
                magnitude.bin_frequencies[k] < bands.edges[b + 1])
                bin_idx.push_back(k);
        if (bin_idx.empty())
            continue; // contrast stays 0
        for (std::size_t t = 0; t < magnitude.frames(); ++t) {
            double lo = magnitude.values(t, bin_idx[0]);
            double hi = lo;
            for (std::size_t k : bin_idx) {
                lo = std::min(lo, magnitude.values(t, k));
                hi = std::max(hi, magnitude.values(t, k));
            }
            out(t, b) = hi - lo;
        }
    }
    return out;
}

FrameSeries spectral_rolloff(const Spectrogram& power, double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw param_error("rolloff threshold must be in (0, 1]");
    FrameSeries out;
    out.name = "rolloff";
    out.values.resize(power.frames(), 0.0);
    for (std::size_t t = 0; t < power.frames(); ++t) {
        double total = 0.0;
        for (std::size_t k = 0; k < power.bins(); ++k)
            total += power.values(t, k);
        if (total < 1e-12)
            continue;
        const double target = threshold * total;
        double cumulative = 0.0;
        for (std::size_t k = 0; k < power.bins(); ++k) {
            cumulative += power.values(t, k);
            if (cumulative >= target) {
                out.values[t] = power.bin_frequencies[k];
                break;
            }
        }
    }
    return out;
}

std::pair<double, double> aggregate(const std::vector<double>& series) {
    if (series.empty())
        throw param_error("aggregate: empty series");
    const double n = static_cast<double>(series.size());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double var = 0.0;
    for (double v : series)
        var += (v - mean) * (v - mean);
    return {mean, std::sqrt(var / n)};
}

namespace {

// mean/std per column, appended in column order
void aggregate_columns(const Matrix& m, std::vector<double>& out) {
    for (std::size_t c = 0; c < m.cols; ++c) {
        std::vector<double> column(m.rows);
        for (std::size_t r = 0; r < m.rows; ++r)
            column[r] = m(r, c);
        const auto [mean, sd] = aggregate(column);
        out.push_back(mean);
        out.push_back(sd);
    }
}

} // namespace

FeatureVector extract(const AudioClip& clip, const FeatureConfig& config) {
    validate_clip(clip);
    const StftParams stft_params{config.frames.frame_length, config.frames.hop_length};

    const Moments amp = central_moments(clip);
    const FrameSeries zcr = zero_crossing_rate(clip, config.frames);
    const FrameSeries energy = rmse(clip, config.frames);

    // One STFT feeds every spectral feature.
    const ComplexSpectrogram spectrum = stft(clip, stft_params);
    const Spectrogram power = power_spectrogram(spectrum);
    const Spectrogram magnitude = magnitude_spectrogram(spectrum);

    const double nyquist = clip.sample_rate / 2.0;
    const MelFilterbank fb_tempo =
        mel_filterbank(clip.sample_rate, stft_params.n_fft, config.n_mels_tempo, 0.0, nyquist);
    const Spectrogram mel_db = power_to_db(apply_filterbank(power, fb_tempo));
    const double fps =
        static_cast<double>(clip.sample_rate) / static_cast<double>(stft_params.hop);
    const double bpm = tempo_from_onsets(onset_envelope(mel_db), fps, config.tempo_bpm_min,
                                         config.tempo_bpm_max, config.tempo_prior_bpm);

    const MelFilterbank fb_mfcc =
        mel_filterbank(clip.sample_rate, stft_params.n_fft, config.n_mfcc, 0.0, nyquist);
    const Matrix mfccs = mfcc_from_power(power, fb_mfcc, config.n_mfcc);
    const Matrix chroma_energy = chroma(power);
    const FrameSeries centroid = spectral_centroid(power);
    const FrameSeries bandwidth = spectral_bandwidth(power, config.bandwidth_order);
    const Matrix contrast = spectral_contrast(magnitude, ContrastBands::defaults(clip.sample_rate));
    const FrameSeries rolloff = spectral_rolloff(power, config.rolloff_threshold);

    std::vector<double> v;
    v.reserve(kFeatureDim);
    v.insert(v.end(), {amp.mean, amp.stddev, amp.skewness, amp.kurtosis});
    const auto [zcr_mean, zcr_std] = aggregate(zcr.values);
    v.insert(v.end(), {zcr_mean, zcr_std});
    const auto [rmse_mean, rmse_std] = aggregate(energy.values);
    v.insert(v.end(), {rmse_mean, rmse_std});
    v.push_back(bpm);

    // Matrix features interleave per-column (mean, std); the canonical layout
    // wants all means then all stds, so aggregate into a scratch buffer first.
    std::vector<double> scratch;
    aggregate_columns(mfccs, scratch);
    for (std::size_t i = 0; i < config.n_mfcc; ++i)
        v.push_back(scratch[2 * i]);
    for (std::size_t i = 0; i < config.n_mfcc; ++i)
        v.push_back(scratch[2 * i + 1]);

    scratch.clear();
    aggregate_columns(chroma_energy, scratch);
    for (std::size_t i = 0; i < kNumChroma; ++i)
        v.push_back(scratch[2 * i]);
    for (std::size_t i = 0; i < kNumChroma; ++i)
        v.push_back(scratch[2 * i + 1]);

    const auto [centroid_mean, centroid_std] = aggregate(centroid.values);
    v.insert(v.end(), {centroid_mean, centroid_std});
    const auto [bw_mean, bw_std] = aggregate(bandwidth.values);
    v.insert(v.end(), {bw_mean, bw_std});

    scratch.clear();
    aggregate_columns(contrast, scratch);
    for (std::size_t i = 0; i < kNumContrastBands; ++i)
        v.push_back(scratch[2 * i]);
    for (std::size_t i = 0; i < kNumContrastBands; ++i)
        v.push_back(scratch[2 * i + 1]);

    const auto [rolloff_mean, rolloff_std] = aggregate(rolloff.values);
    v.insert(v.end(), {rolloff_mean, rolloff_std});

    if (v.size() != kFeatureDim)
        throw param_error("feature layout mismatch: assembled " + std::to_string(v.size()) +
                          " entries");
    FeatureVector out;
    std::copy(v.begin(), v.end(), out.values.begin());
    return out;
}

} // namespace mgc
