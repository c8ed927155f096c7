#include "mgc/logistic.hpp"

#include <cmath>

#include "mgc/error.hpp"

namespace mgc {

std::vector<double> LogisticOvrModel::scores(const double* x, std::size_t d) const {
    const std::vector<double> z = standardizer.apply(x, d);
    std::vector<double> out(weights.rows);
    for (std::size_t c = 0; c < weights.rows; ++c) {
        double acc = biases[c];
        const double* w = weights.row(c);
        for (std::size_t i = 0; i < d; ++i)
            acc += w[i] * z[i];
        out[c] = sigmoid(acc);
    }
    return out;
}

std::vector<double> LogisticOvrModel::predict_proba(const double* x, std::size_t d) const {
    std::vector<double> s = scores(x, d);
    double sum = 0.0;
    for (double v : s)
        sum += v;
    for (double& v : s)
        v /= sum;
    return s;
}

int LogisticOvrModel::predict(const double* x, std::size_t d) const {
    return argmax(scores(x, d));
}

double binary_logistic_loss(const Matrix& features, const std::vector<int>& targets,
                            const std::vector<double>& weights, double bias, double lambda) {
    const double n = static_cast<double>(features.rows);
    double loss = 0.0;
    for (std::size_t r = 0; r < features.rows; ++r) {
        double z = bias;
        const double* x = features.row(r);
        for (std::size_t i = 0; i < features.cols; ++i)
            z += weights[i] * x[i];
        const double p = sigmoid(z);
        loss += targets[r] == 1 ? -std::log(std::max(p, 1e-12))
                                : -std::log(std::max(1.0 - p, 1e-12));
    }
    double w2 = 0.0;
    for (double w : weights)
        w2 += w * w;
    return loss / n + 0.5 * lambda * w2;
}

std::vector<double> binary_logistic_gradient(const Matrix& features,
                                             const std::vector<int>& targets,
                                             const std::vector<double>& weights, double bias,
                                             double lambda, double& grad_bias) {
    const double n = static_cast<double>(features.rows);
    std::vector<double> grad(features.cols, 0.0);
    grad_bias = 0.0;
    for (std::size_t r = 0; r < features.rows; ++r) {
        double z = bias;
        const double* x = features.row(r);
        for (std::size_t i = 0; i < features.cols; ++i)
            z += weights[i] * x[i];
        const double err = sigmoid(z) - static_cast<double>(targets[r]);
        for (std::size_t i = 0; i < features.cols; ++i)
            grad[i] += err * x[i];
        grad_bias += err;
    }
    for (std::size_t i = 0; i < features.cols; ++i)
        grad[i] = grad[i] / n + lambda * weights[i];
    grad_bias /= n;
    return grad;
}

LogisticOvrModel train_logistic_ovr(const Dataset& train, const Dataset& val,
                                    const LogisticOvrHp& hp) {
    (void)val; // convex objective, no epoch selection
    train.validate();
    const std::size_t n_classes = train.class_names.size();
    const std::size_t d = train.feature_dim();

    LogisticOvrModel model;
    model.hp = hp;
    model.class_names = train.class_names;
    model.standardizer = fit_standardizer(train.features);
    model.weights = Matrix(n_classes, d);
    model.biases.assign(n_classes, 0.0);

    const Matrix features = model.standardizer.apply(train.features);

    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<int> targets(train.size());
        for (std::size_t r = 0; r < train.size(); ++r)
            targets[r] = train.labels[r] == static_cast<int>(c) ? 1 : 0;

        std::vector<double> w(d, 0.0);
        double b = 0.0;
        for (std::size_t iter = 0; iter < hp.iterations; ++iter) {
            double grad_b = 0.0;
            const std::vector<double> grad =
                binary_logistic_gradient(features, targets, w, b, hp.lambda, grad_b);
            for (std::size_t i = 0; i < d; ++i)
                w[i] -= hp.step * grad[i];
            b -= hp.step * grad_b;
        }
        const double loss = binary_logistic_loss(features, targets, w, b, hp.lambda);
        if (!std::isfinite(loss))
            throw divergence_error("logistic training diverged for class '" +
                                   train.class_names[c] + "' with step size " +
                                   std::to_string(hp.step));
        for (std::size_t i = 0; i < d; ++i)
            model.weights(c, i) = w[i];
        model.biases[c] = b;
    }
    return model;
}

} // namespace mgc
