#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgc/classifier_common.hpp"
#include "mgc/dataset.hpp"

namespace mgc {

struct MlpHp {
    std::vector<std::size_t> hidden{512, 32};
    double dropout_rate = 0.3;
    double lambda = 0.001;
    double learning_rate = 1e-3; // Adam
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    bool standardize = true; // off for [0,1] spectrogram pixels
};

struct MlpLayer {
    Matrix weights; // out x in
    std::vector<double> biases;
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0; // mean cross-entropy, no L2 term
    double val_accuracy = 0.0;
};

/// Feed-forward net input -> hidden... -> n_classes with ReLU activations and
/// a softmax readout. Inverted dropout on hidden activations during training
/// only; L2 penalty on weights (biases unpenalized).
struct MlpModel {
    std::vector<MlpLayer> layers;
    std::optional<Standardizer> standardizer;
    std::vector<std::string> class_names;
    MlpHp hp;
    std::vector<EpochStats> history;
    std::size_t selected_epoch = 0;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().weights.cols; }

    std::vector<double> predict_proba(const double* x, std::size_t d) const;
    int predict(const double* x, std::size_t d) const;

    double sum_squared_weights() const;
};

/// Gradients in the same shape as the model's layers.
struct MlpGradients {
    std::vector<MlpLayer> layers;
};

/// Builds an untrained net with seeded He-initialized weights.
MlpModel make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                  std::size_t n_classes, std::uint64_t seed);

/// Batch loss (mean cross-entropy + (lambda/2)*sum w^2) without dropout.
/// Inputs are the raw rows of `batch` (standardization is the caller's job).
double mlp_loss(const MlpModel& model, const Matrix& batch, const std::vector<int>& labels,
                double lambda);

/// Analytic gradient of mlp_loss (dropout disabled).
MlpGradients mlp_gradient(const MlpModel& model, const Matrix& batch,
                          const std::vector<int>& labels, double lambda);

/// Trains with Adam on shuffled mini-batches; records per-epoch validation
/// stats and returns the snapshot with minimum validation loss. Throws
/// divergence_error on a non-finite loss.
MlpModel train_mlp(const Dataset& train, const Dataset& val, const MlpHp& hp = {});

} // namespace mgc
