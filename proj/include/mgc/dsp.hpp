#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mgc/audio.hpp"
#include "mgc/matrix.hpp"

namespace mgc {

enum class SpectrogramScale { Magnitude, Power, Decibel };

/// Real time-frequency matrix, frames x bins, with a frequency axis.
/// Linear-frequency spectrograms carry 1 + n_fft/2 bins at k*sr/n_fft Hz;
/// Mel spectrograms carry one bin per filter at the filter center frequency.
struct Spectrogram {
    Matrix values; // frames x bins
    std::vector<double> bin_frequencies;
    std::size_t frame_hop = 0;
    int sample_rate = 0;
    SpectrogramScale scale = SpectrogramScale::Power;

    std::size_t frames() const { return values.rows; }
    std::size_t bins() const { return values.cols; }
};

/// Complex STFT output; kept separate from Spectrogram so downstream code
/// never sees complex values.
struct ComplexSpectrogram {
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::vector<std::complex<double>> values; // row-major frames x bins
    std::vector<double> bin_frequencies;
    std::size_t frame_hop = 0;
    int sample_rate = 0;

    std::complex<double>& at(std::size_t f, std::size_t b) { return values[f * bins + b]; }
    const std::complex<double>& at(std::size_t f, std::size_t b) const {
        return values[f * bins + b];
    }
};

struct StftParams {
    std::size_t n_fft = 2048; // must be a power of two
    std::size_t hop = 512;
};

/// Triangular mel filterbank. weights is n_mels x (1 + n_fft/2); each row is
/// unimodal with its tallest sample normalized to exactly 1.
struct MelFilterbank {
    Matrix weights;
    std::vector<double> center_frequencies; // Hz, one per filter
    double f_min = 0.0;
    double f_max = 0.0;
    std::size_t n_mels = 0;
};

/// mel(f) = 2595 * log10(1 + f/700) and its inverse.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Symmetric Hann window: w[i] = 0.5 - 0.5*cos(2*pi*i/(n-1)). n >= 2.
std::vector<double> hann_window(std::size_t n);

/// In-place radix-2 iterative FFT. Length must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

/// Direct O(n^2) DFT: X[k] = sum_n x[n] * exp(-2*pi*i*k*n/N). Test oracle;
/// kept deliberately independent of the radix-2 path.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& frame);

/// Hann-windowed short-time Fourier transform keeping bins 0..n_fft/2.
/// Throws param_error if the clip is shorter than n_fft or n_fft is not a
/// power of two.
ComplexSpectrogram stft(const AudioClip& clip, const StftParams& params);

/// Element-wise |X|^2.
Spectrogram power_spectrogram(const ComplexSpectrogram& stft_out);

/// Element-wise |X|.
Spectrogram magnitude_spectrogram(const ComplexSpectrogram& stft_out);

/// n_mels triangular filters with centers equally spaced on the mel scale
/// between f_min and f_max. Requires f_min < f_max <= sr/2 and n_mels >= 2.
MelFilterbank mel_filterbank(int sample_rate, std::size_t n_fft, std::size_t n_mels,
                             double f_min, double f_max);

/// Power spectrogram projected through the filterbank: frames x n_mels.
Spectrogram mel_spectrogram(const AudioClip& clip, const StftParams& params,
                            const MelFilterbank& fb);
Spectrogram apply_filterbank(const Spectrogram& power, const MelFilterbank& fb);

/// 10*log10(v/ref) with ref = matrix max, floor amin = 1e-10, then clamped to
/// the top 80 dB. Output max is 0 dB; silence maps to a constant 0 dB matrix.
Spectrogram power_to_db(const Spectrogram& spec);

/// Orthonormal DCT-II along each row, keeping the first n_coeffs columns.
Matrix dct_ii(const Matrix& input, std::size_t n_coeffs);

/// Normalizes to [0, 1] by (v - min)/(max - min), resizes with corner-aligned
/// bilinear sampling, then renormalizes the result to [0, 1] so the output
/// spans the full range. A constant input yields an all-zero output.
Matrix resize_bilinear(const Matrix& input, std::size_t out_h, std::size_t out_w);

} // namespace mgc
