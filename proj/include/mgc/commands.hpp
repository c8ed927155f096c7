#pragma once

#include <string>
#include <vector>

#include "mgc/config.hpp"
#include "mgc/dataset.hpp"

namespace mgc {

/// Resample to the configured rate and apply pre-emphasis (when enabled).
/// Every extraction path goes through this.
AudioClip prepare_clip(const AudioClip& raw, const RunConfig& config);

/// Flattened row-major [0,1] pixels of the resized mel-dB image
/// (image_size x image_size), mel bands as rows.
std::vector<double> spectrogram_pixels(const AudioClip& raw, const RunConfig& config);

struct SynthOptions {
    std::string out_dir;
    std::size_t clips_per_class = 30;
    double duration_s = 10.0;
};

/// Writes the 7-class synthetic corpus (WAVs + manifest.csv + run_meta.json).
void cmd_synth(const SynthOptions& options, const RunConfig& config);

/// Extracts features for every manifest row, in manifest order, fanning out
/// over `config.jobs` workers. Per-row failures are reported on stderr and
/// the run continues; returns the number of failed rows.
std::size_t cmd_extract(const std::string& manifest_path, const std::string& out_csv,
                        const RunConfig& config);

void cmd_spectrogram(const std::string& wav_path, const std::string& out_pgm,
                     const std::string& out_csv, const RunConfig& config);

/// model_type: logistic | random_forest | gbt | mlp_features | mlp_spectrogram.
/// Feature models read features_csv; mlp_spectrogram renders images from the
/// manifest on the fly.
void cmd_train(const std::string& model_type, const std::string& features_csv,
               const std::string& manifest_path, const std::string& out_model,
               const RunConfig& config);

/// Evaluates each model on the held-out test split of its recorded seed and,
/// when two or more models are given, the probability-averaging ensemble.
void cmd_evaluate(const std::vector<std::string>& model_paths, const std::string& features_csv,
                  const std::string& manifest_path, const std::string& out_dir,
                  const RunConfig& config);

void cmd_importance(const std::string& model_path, const std::string& out_csv,
                    std::size_t top_n = 20);

void cmd_ablate(const std::string& features_csv, const std::string& out_csv,
                const std::vector<std::size_t>& n_values, const RunConfig& config);

void cmd_domains(const std::string& features_csv, const std::string& out_csv,
                 const RunConfig& config);

} // namespace mgc
