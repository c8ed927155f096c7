#pragma once

#include <cstddef>
#include <vector>

#include "mgc/dataset.hpp"
#include "mgc/matrix.hpp"

namespace mgc {

/// Per-feature affine transform learned on training data. Constant features
/// (std < 1e-12) are centered only.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds; // always > 0

    std::vector<double> apply(const double* x, std::size_t d) const;
    Matrix apply(const Matrix& features) const;
};

Standardizer fit_standardizer(const Matrix& train_features);

/// -log p[label] with p clamped to >= 1e-12.
double cross_entropy(const std::vector<double>& distribution, int label);

/// Mean cross-entropy over a batch plus (lambda/2) * sum_w2.
double batch_cross_entropy(const std::vector<std::vector<double>>& distributions,
                           const std::vector<int>& labels, double lambda = 0.0,
                           double sum_squared_weights = 0.0);

/// Numerically stable softmax.
std::vector<double> softmax(const std::vector<double>& logits);

double sigmoid(double z);

int argmax(const std::vector<double>& values);

} // namespace mgc
