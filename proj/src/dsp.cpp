#include "mgc/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgc/error.hpp"

namespace mgc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> hann_window(std::size_t n) {
    if (n < 2)
        throw param_error("hann window length must be >= 2");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
    return w;
}

void fft_inplace(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n))
        throw param_error("fft length must be a power of two, got " + std::to_string(n));

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -kTwoPi / static_cast<double>(len);
        const std::complex<double> w_len(std::cos(angle), std::sin(angle));
        for (std::size_t start = 0; start < n; start += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> even = data[start + k];
                const std::complex<double> odd = data[start + k + len / 2] * w;
                data[start + k] = even + odd;
                data[start + k + len / 2] = even - odd;
                w *= w_len;
            }
        }
    }
}

std::vector<std::complex<double>> naive_dft(const std::vector<double>& frame) {
    const std::size_t n = frame.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0)
        return out;
    // Twiddle table indexed by k*t mod n; avoids n^2 trig calls.
    std::vector<double> cos_table(n), sin_table(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double angle = -kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        cos_table[i] = std::cos(angle);
        sin_table[i] = std::sin(angle);
    }
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        std::size_t idx = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += frame[t] * cos_table[idx];
            im += frame[t] * sin_table[idx];
            idx += k;
            if (idx >= n)
                idx -= n;
        }
        out[k] = {re, im};
    }
    return out;
}

ComplexSpectrogram stft(const AudioClip& clip, const StftParams& params) {
    if (!is_power_of_two(params.n_fft))
        throw param_error("stft n_fft must be a power of two, got " + std::to_string(params.n_fft));
    if (params.hop == 0 || params.hop > params.n_fft)
        throw param_error("stft requires 0 < hop <= n_fft");
    const FrameParams fp{params.n_fft, params.hop};
    const std::size_t n_frames = frame_count(clip.samples.size(), fp);
    if (n_frames == 0)
        throw param_error("clip of " + std::to_string(clip.samples.size()) +
                          " samples is shorter than n_fft (" + std::to_string(params.n_fft) + ")");

    const std::vector<double> window = hann_window(params.n_fft);
    const std::size_t n_bins = params.n_fft / 2 + 1;

    ComplexSpectrogram out;
    out.frames = n_frames;
    out.bins = n_bins;
    out.values.resize(n_frames * n_bins);
    out.frame_hop = params.hop;
    out.sample_rate = clip.sample_rate;
    out.bin_frequencies.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k)
        out.bin_frequencies[k] =
            static_cast<double>(k) * clip.sample_rate / static_cast<double>(params.n_fft);

    std::vector<std::complex<double>> buffer(params.n_fft);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const double* src = clip.samples.data() + f * params.hop;
        for (std::size_t i = 0; i < params.n_fft; ++i)
            buffer[i] = {src[i] * window[i], 0.0};
        fft_inplace(buffer);
        for (std::size_t k = 0; k < n_bins; ++k)
            out.at(f, k) = buffer[k];
    }
    return out;
}

namespace {

Spectrogram spectrogram_from_complex(const ComplexSpectrogram& stft_out,
                                     SpectrogramScale scale) {
    Spectrogram out;
    out.values = Matrix(stft_out.frames, stft_out.bins);
    out.bin_frequencies = stft_out.bin_frequencies;
    out.frame_hop = stft_out.frame_hop;
    out.sample_rate = stft_out.sample_rate;
    out.scale = scale;
    for (std::size_t f = 0; f < stft_out.frames; ++f)
        for (std::size_t k = 0; k < stft_out.bins; ++k) {
            const std::complex<double>& v = stft_out.at(f, k);
            const double p = v.real() * v.real() + v.imag() * v.imag();
            out.values(f, k) = scale == SpectrogramScale::Power ? p : std::sqrt(p);
        }
    return out;
}

} // namespace

Spectrogram power_spectrogram(const ComplexSpectrogram& stft_out) {
    return spectrogram_from_complex(stft_out, SpectrogramScale::Power);
}

Spectrogram magnitude_spectrogram(const ComplexSpectrogram& stft_out) {
    return spectrogram_from_complex(stft_out, SpectrogramScale::Magnitude);
}

MelFilterbank mel_filterbank(int sample_rate, std::size_t n_fft, std::size_t n_mels,
                             double f_min, double f_max) {
    if (n_mels < 2)
        throw param_error("mel filterbank needs n_mels >= 2");
    if (!(f_min < f_max) || f_max > sample_rate / 2.0 || f_min < 0.0)
        throw param_error("mel filterbank requires 0 <= f_min < f_max <= sr/2");

    const std::size_t n_bins = n_fft / 2 + 1;
    const double mel_min = hz_to_mel(f_min);
    const double mel_max = hz_to_mel(f_max);

    // n_mels + 2 points equally spaced in mel; filter m spans points
    // [m, m+2] with its peak at point m+1.
    std::vector<double> points_hz(n_mels + 2);
    for (std::size_t i = 0; i < points_hz.size(); ++i)
        points_hz[i] =
            mel_to_hz(mel_min + (mel_max - mel_min) * static_cast<double>(i) /
                                    static_cast<double>(n_mels + 1));

    MelFilterbank fb;
    fb.f_min = f_min;
    fb.f_max = f_max;
    fb.n_mels = n_mels;
    fb.weights = Matrix(n_mels, n_bins);
    fb.center_frequencies.assign(points_hz.begin() + 1, points_hz.end() - 1);

    for (std::size_t m = 0; m < n_mels; ++m) {
        const double left = points_hz[m];
        const double center = points_hz[m + 1];
        const double right = points_hz[m + 2];
        double row_max = 0.0;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
            double w = 0.0;
            if (f > left && f < right)
                w = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
            fb.weights(m, k) = w;
            row_max = std::max(row_max, w);
        }
        // Height-1 triangles: scale so the tallest sampled weight is exactly 1.
        if (row_max > 0.0)
            for (std::size_t k = 0; k < n_bins; ++k)
                fb.weights(m, k) /= row_max;
    }
    return fb;
}

Spectrogram apply_filterbank(const Spectrogram& power, const MelFilterbank& fb) {
    if (power.scale != SpectrogramScale::Power)
        throw param_error("mel projection expects a power-scale spectrogram");
    if (power.bins() != fb.weights.cols)
        throw param_error("filterbank bin count does not match spectrogram");

    Spectrogram out;
    out.values = Matrix(power.frames(), fb.n_mels);
    out.bin_frequencies = fb.center_frequencies;
    out.frame_hop = power.frame_hop;
    out.sample_rate = power.sample_rate;
    out.scale = SpectrogramScale::Power;
    for (std::size_t f = 0; f < power.frames(); ++f) {
        const double* src = power.values.row(f);
        for (std::size_t m = 0; m < fb.n_mels; ++m) {
            const double* w = fb.weights.row(m);
            double acc = 0.0;
            for (std::size_t k = 0; k < power.bins(); ++k)
                acc += src[k] * w[k];
            out.values(f, m) = acc;
        }
    }
    return out;
}

Spectrogram mel_spectrogram(const AudioClip& clip, const StftParams& params,
                            const MelFilterbank& fb) {
    return apply_filterbank(power_spectrogram(stft(clip, params)), fb);
}

Spectrogram power_to_db(const Spectrogram& spec) {
    if (spec.scale != SpectrogramScale::Power)
        throw param_error("power_to_db expects a power-scale spectrogram");
    constexpr double kAmin = 1e-10;
    constexpr double kDynamicRange = 80.0;

    double ref = 0.0;
    for (double v : spec.values.data)
        ref = std::max(ref, v);
    const double log_ref = std::log10(std::max(ref, kAmin));

    Spectrogram out = spec;
    out.scale = SpectrogramScale::Decibel;
    double max_db = -std::numeric_limits<double>::infinity();
    for (double& v : out.values.data) {
        v = 10.0 * (std::log10(std::max(v, kAmin)) - log_ref);
        max_db = std::max(max_db, v);
    }
    const double floor_db = max_db - kDynamicRange;
    for (double& v : out.values.data)
        v = std::max(v, floor_db);
    return out;
}

Matrix dct_ii(const Matrix& input, std::size_t n_coeffs) {
    if (n_coeffs > input.cols)
        throw param_error("dct_ii: n_coeffs exceeds input width");
    const std::size_t n = input.cols;
    // Orthonormal basis: C[k][t] = s_k * cos(pi*(2t+1)*k / (2n)).
    Matrix basis(n_coeffs, n);
    const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n_coeffs; ++k)
        for (std::size_t t = 0; t < n; ++t)
            basis(k, t) = (k == 0 ? scale0 : scale) *
                          std::cos(kPi * (2.0 * static_cast<double>(t) + 1.0) *
                                   static_cast<double>(k) / (2.0 * static_cast<double>(n)));

    Matrix out(input.rows, n_coeffs);
    for (std::size_t r = 0; r < input.rows; ++r)
        for (std::size_t k = 0; k < n_coeffs; ++k) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                acc += basis(k, t) * input(r, t);
            out(r, k) = acc;
        }
    return out;
}

namespace {

void normalize_unit_range(Matrix& m) {
    if (m.empty())
        return;
    double lo = m.data[0], hi = m.data[0];
    for (double v : m.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo <= 0.0) {
        std::fill(m.data.begin(), m.data.end(), 0.0);
        return;
    }
    const double inv = 1.0 / (hi - lo);
    for (double& v : m.data)
        v = (v - lo) * inv;
}

} // namespace

Matrix resize_bilinear(const Matrix& input, std::size_t out_h, std::size_t out_w) {
    if (input.rows < 2 || input.cols < 2)
        throw param_error("resize_bilinear needs an input of at least 2x2");
    if (out_h < 2 || out_w < 2)
        throw param_error("resize_bilinear needs an output of at least 2x2");

    Matrix norm = input;
    normalize_unit_range(norm);

    Matrix out(out_h, out_w);
    const double row_step = static_cast<double>(input.rows - 1) / static_cast<double>(out_h - 1);
    const double col_step = static_cast<double>(input.cols - 1) / static_cast<double>(out_w - 1);
    for (std::size_t r = 0; r < out_h; ++r) {
        const double sy = r * row_step;
        const std::size_t y0 = std::min(static_cast<std::size_t>(sy), input.rows - 2);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t c = 0; c < out_w; ++c) {
            const double sx = c * col_step;
            const std::size_t x0 = std::min(static_cast<std::size_t>(sx), input.cols - 2);
            const double fx = sx - static_cast<double>(x0);
            const double top = norm(y0, x0) * (1.0 - fx) + norm(y0, x0 + 1) * fx;
            const double bot = norm(y0 + 1, x0) * (1.0 - fx) + norm(y0 + 1, x0 + 1) * fx;
            out(r, c) = top * (1.0 - fy) + bot * fy;
        }
    }
    normalize_unit_range(out);
    return out;
}

} // namespace mgc
