#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgc/classifier_common.hpp"
#include "mgc/dataset.hpp"

namespace mgc {

struct LogisticOvrHp {
    std::size_t iterations = 500;
    double step = 0.1;
    double lambda = 1e-3;
};

/// One-vs-rest logistic regression: one binary sigmoid classifier per class,
/// trained by full-batch gradient descent on standardized features.
struct LogisticOvrModel {
    Standardizer standardizer;
    Matrix weights; // n_classes x d
    std::vector<double> biases;
    std::vector<std::string> class_names;
    LogisticOvrHp hp;

    /// Raw per-class sigmoid scores on standardized input.
    std::vector<double> scores(const double* x, std::size_t d) const;

    /// Sigmoid scores normalized to sum 1.
    std::vector<double> predict_proba(const double* x, std::size_t d) const;

    /// argmax of the raw scores.
    int predict(const double* x, std::size_t d) const;
};

/// Loss of one binary classifier: mean binary cross-entropy plus
/// (lambda/2)*|w|^2 (bias unpenalized). Exposed for gradient checking.
double binary_logistic_loss(const Matrix& features, const std::vector<int>& targets,
                            const std::vector<double>& weights, double bias, double lambda);

/// Analytic gradient of binary_logistic_loss; grad_bias on return.
std::vector<double> binary_logistic_gradient(const Matrix& features,
                                             const std::vector<int>& targets,
                                             const std::vector<double>& weights, double bias,
                                             double lambda, double& grad_bias);

/// Throws divergence_error (naming the step size) if the loss goes
/// non-finite.
LogisticOvrModel train_logistic_ovr(const Dataset& train, const Dataset& val,
                                    const LogisticOvrHp& hp = {});

} // namespace mgc
