#include "mgc/classifier_common.hpp"

#include <algorithm>
#include <cmath>

#include "mgc/error.hpp"

namespace mgc {

std::vector<double> Standardizer::apply(const double* x, std::size_t d) const {
    if (d != means.size())
        throw param_error("standardizer dimension mismatch: " + std::to_string(d) + " vs " +
                          std::to_string(means.size()));
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i)
        out[i] = (x[i] - means[i]) / stds[i];
    return out;
}

Matrix Standardizer::apply(const Matrix& features) const {
    Matrix out(features.rows, features.cols);
    for (std::size_t r = 0; r < features.rows; ++r) {
        const std::vector<double> row = apply(features.row(r), features.cols);
        std::copy(row.begin(), row.end(), out.row(r));
    }
    return out;
}

Standardizer fit_standardizer(const Matrix& train_features) {
    if (train_features.rows == 0)
        throw param_error("cannot fit standardizer on an empty set");
    const double n = static_cast<double>(train_features.rows);
    Standardizer s;
    s.means.assign(train_features.cols, 0.0);
    s.stds.assign(train_features.cols, 0.0);
    for (std::size_t r = 0; r < train_features.rows; ++r)
        for (std::size_t c = 0; c < train_features.cols; ++c)
            s.means[c] += train_features(r, c);
    for (double& m : s.means)
        m /= n;
    for (std::size_t r = 0; r < train_features.rows; ++r)
        for (std::size_t c = 0; c < train_features.cols; ++c) {
            const double d = train_features(r, c) - s.means[c];
            s.stds[c] += d * d;
        }
    for (double& v : s.stds) {
        v = std::sqrt(v / n);
        if (v < 1e-12)
            v = 1.0; // constant feature: center only
    }
    return s;
}

double cross_entropy(const std::vector<double>& distribution, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= distribution.size())
        throw param_error("cross_entropy label out of range");
    return -std::log(std::max(distribution[static_cast<std::size_t>(label)], 1e-12));
}

double batch_cross_entropy(const std::vector<std::vector<double>>& distributions,
                           const std::vector<int>& labels, double lambda,
                           double sum_squared_weights) {
    if (distributions.empty() || distributions.size() != labels.size())
        throw param_error("batch_cross_entropy needs equal-length non-empty inputs");
    double total = 0.0;
    for (std::size_t i = 0; i < distributions.size(); ++i)
        total += cross_entropy(distributions[i], labels[i]);
    return total / static_cast<double>(distributions.size()) +
           0.5 * lambda * sum_squared_weights;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    std::vector<double> out(logits.size());
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        sum += out[i];
    }
    for (double& v : out)
        v /= sum;
    return out;
}

double sigmoid(double z) {
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

int argmax(const std::vector<double>& values) {
    return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

} // namespace mgc
