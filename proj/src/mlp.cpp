#include "mgc/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

namespace {

struct ForwardState {
    std::vector<Matrix> activations;    // per layer input: a0 = batch, a1, ...
    std::vector<Matrix> pre_activation; // z per layer
    Matrix probs;                       // softmax output
};

/// masks[l] is empty (no dropout) or batch x units of {0, 1/(1-p)} factors
/// applied to the ReLU output of hidden layer l.
ForwardState forward(const MlpModel& model, const Matrix& batch,
                     const std::vector<Matrix>* masks) {
    const std::size_t n_layers = model.layers.size();
    ForwardState state;
    state.activations.resize(n_layers + 1);
    state.pre_activation.resize(n_layers);
    state.activations[0] = batch;

    for (std::size_t l = 0; l < n_layers; ++l) {
        const MlpLayer& layer = model.layers[l];
        const Matrix& a = state.activations[l];
        Matrix z(a.rows, layer.weights.rows);
        for (std::size_t b = 0; b < a.rows; ++b) {
            const double* in = a.row(b);
            double* out = z.row(b);
            for (std::size_t o = 0; o < layer.weights.rows; ++o) {
                const double* w = layer.weights.row(o);
                double acc = layer.biases[o];
                for (std::size_t i = 0; i < layer.weights.cols; ++i)
                    acc += w[i] * in[i];
                out[o] = acc;
            }
        }
        state.pre_activation[l] = z;
        if (l + 1 < n_layers) {
            Matrix a_next = z;
            for (double& v : a_next.data)
                v = std::max(0.0, v);
            if (masks && !(*masks)[l].data.empty())
                for (std::size_t i = 0; i < a_next.data.size(); ++i)
                    a_next.data[i] *= (*masks)[l].data[i];
            state.activations[l + 1] = std::move(a_next);
        } else {
            state.activations[l + 1] = z; // softmax applied below
        }
    }

    const Matrix& logits = state.pre_activation.back();
    state.probs = Matrix(logits.rows, logits.cols);
    for (std::size_t b = 0; b < logits.rows; ++b) {
        const std::vector<double> p = softmax({logits.row(b), logits.row(b) + logits.cols});
        std::copy(p.begin(), p.end(), state.probs.row(b));
    }
    return state;
}

double data_loss(const Matrix& probs, const std::vector<int>& labels) {
    double loss = 0.0;
    for (std::size_t b = 0; b < probs.rows; ++b)
        loss += -std::log(std::max(probs(b, static_cast<std::size_t>(labels[b])), 1e-12));
    return loss / static_cast<double>(probs.rows);
}

MlpGradients backward(const MlpModel& model, const ForwardState& state,
                      const std::vector<int>& labels, double lambda,
                      const std::vector<Matrix>* masks) {
    const std::size_t n_layers = model.layers.size();
    const std::size_t batch = state.probs.rows;

    MlpGradients grads;
    grads.layers.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        grads.layers[l].weights =
            Matrix(model.layers[l].weights.rows, model.layers[l].weights.cols);
        grads.layers[l].biases.assign(model.layers[l].biases.size(), 0.0);
    }

    // softmax + cross-entropy: dL/dz = (p - y) / batch
    Matrix delta = state.probs;
    for (std::size_t b = 0; b < batch; ++b)
        delta(b, static_cast<std::size_t>(labels[b])) -= 1.0;
    for (double& v : delta.data)
        v /= static_cast<double>(batch);

    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& a_in = state.activations[l];
        MlpLayer& g = grads.layers[l];
        for (std::size_t b = 0; b < batch; ++b) {
            const double* d = delta.row(b);
            const double* in = a_in.row(b);
            for (std::size_t o = 0; o < g.weights.rows; ++o) {
                if (d[o] == 0.0)
                    continue;
                double* gw = g.weights.row(o);
                for (std::size_t i = 0; i < g.weights.cols; ++i)
                    gw[i] += d[o] * in[i];
                g.biases[o] += d[o];
            }
        }
        for (std::size_t o = 0; o < g.weights.rows; ++o) {
            const double* w = model.layers[l].weights.row(o);
            double* gw = g.weights.row(o);
            for (std::size_t i = 0; i < g.weights.cols; ++i)
                gw[i] += lambda * w[i];
        }
        if (l == 0)
            break;

        Matrix prev_delta(batch, model.layers[l].weights.cols);
        for (std::size_t b = 0; b < batch; ++b) {
            const double* d = delta.row(b);
            double* pd = prev_delta.row(b);
            for (std::size_t o = 0; o < model.layers[l].weights.rows; ++o) {
                if (d[o] == 0.0)
                    continue;
                const double* w = model.layers[l].weights.row(o);
                for (std::size_t i = 0; i < model.layers[l].weights.cols; ++i)
                    pd[i] += d[o] * w[i];
            }
        }
        // through dropout then ReLU of hidden layer l-1
        const Matrix& z = state.pre_activation[l - 1];
        if (masks && !(*masks)[l - 1].data.empty())
            for (std::size_t i = 0; i < prev_delta.data.size(); ++i)
                prev_delta.data[i] *= (*masks)[l - 1].data[i];
        for (std::size_t i = 0; i < prev_delta.data.size(); ++i)
            if (z.data[i] <= 0.0)
                prev_delta.data[i] = 0.0;
        delta = std::move(prev_delta);
    }
    return grads;
}

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& indices) {
    Matrix out(indices.size(), src.cols);
    for (std::size_t r = 0; r < indices.size(); ++r)
        std::copy(src.row(indices[r]), src.row(indices[r]) + src.cols, out.row(r));
    return out;
}

} // namespace

std::vector<double> MlpModel::predict_proba(const double* x, std::size_t d) const {
    if (d != input_dim())
        throw param_error("mlp dimension mismatch: got " + std::to_string(d) + ", expected " +
                          std::to_string(input_dim()));
    Matrix batch(1, d);
    const double* src = x;
    std::vector<double> standardized;
    if (standardizer) {
        standardized = standardizer->apply(x, d);
        src = standardized.data();
    }
    std::copy(src, src + d, batch.row(0));
    const ForwardState state = forward(*this, batch, nullptr);
    return {state.probs.row(0), state.probs.row(0) + state.probs.cols};
}

int MlpModel::predict(const double* x, std::size_t d) const {
    return argmax(predict_proba(x, d));
}

double MlpModel::sum_squared_weights() const {
    double acc = 0.0;
    for (const MlpLayer& layer : layers)
        for (double w : layer.weights.data)
            acc += w * w;
    return acc;
}

MlpModel make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                  std::size_t n_classes, std::uint64_t seed) {
    std::vector<std::size_t> sizes;
    sizes.push_back(input_dim);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(n_classes);

    Rng rng(mix_seed(seed, 0x6d6c70)); // weight-init stream
    MlpModel model;
    model.layers.resize(sizes.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        MlpLayer& layer = model.layers[l];
        layer.weights = Matrix(sizes[l + 1], sizes[l]);
        layer.biases.assign(sizes[l + 1], 0.0);
        const double scale = std::sqrt(2.0 / static_cast<double>(sizes[l]));
        for (double& w : layer.weights.data)
            w = scale * rng.normal();
    }
    return model;
}

double mlp_loss(const MlpModel& model, const Matrix& batch, const std::vector<int>& labels,
                double lambda) {
    const ForwardState state = forward(model, batch, nullptr);
    return data_loss(state.probs, labels) + 0.5 * lambda * model.sum_squared_weights();
}

MlpGradients mlp_gradient(const MlpModel& model, const Matrix& batch,
                          const std::vector<int>& labels, double lambda) {
    const ForwardState state = forward(model, batch, nullptr);
    return backward(model, state, labels, lambda, nullptr);
}

MlpModel train_mlp(const Dataset& train, const Dataset& val, const MlpHp& hp) {
    train.validate();
    val.validate();
    const std::size_t n = train.size();
    const std::size_t d = train.feature_dim();
    const std::size_t n_classes = train.class_names.size();

    MlpModel model = make_mlp(d, hp.hidden, n_classes, hp.seed);
    model.hp = hp;
    model.class_names = train.class_names;
    if (hp.standardize)
        model.standardizer = fit_standardizer(train.features);

    const Matrix train_x =
        model.standardizer ? model.standardizer->apply(train.features) : train.features;
    const Matrix val_x =
        model.standardizer ? model.standardizer->apply(val.features) : val.features;

    // Adam state, one slot per layer
    std::vector<MlpLayer> m_state(model.layers.size()), v_state(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        m_state[l].weights = Matrix(model.layers[l].weights.rows, model.layers[l].weights.cols);
        m_state[l].biases.assign(model.layers[l].biases.size(), 0.0);
        v_state[l].weights = Matrix(model.layers[l].weights.rows, model.layers[l].weights.cols);
        v_state[l].biases.assign(model.layers[l].biases.size(), 0.0);
    }

    Rng shuffle_rng(mix_seed(hp.seed, 0x7368)); // shuffle stream
    Rng dropout_rng(mix_seed(hp.seed, 0x6472)); // dropout stream

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<MlpLayer> best_layers = model.layers;
    double best_val_loss = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t adam_t = 0;

    const auto adam_update = [&](Matrix& w, Matrix& mw, Matrix& vw, const Matrix& gw) {
        const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(adam_t));
        const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(adam_t));
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            mw.data[i] = hp.beta1 * mw.data[i] + (1.0 - hp.beta1) * gw.data[i];
            vw.data[i] = hp.beta2 * vw.data[i] + (1.0 - hp.beta2) * gw.data[i] * gw.data[i];
            const double m_hat = mw.data[i] / bc1;
            const double v_hat = vw.data[i] / bc2;
            w.data[i] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
        }
    };

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        // seeded Fisher-Yates shuffle each epoch
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.bounded(i + 1)]);

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < n; start += hp.batch_size) {
            std::vector<std::size_t> batch_idx(
                order.begin() + static_cast<std::ptrdiff_t>(start),
                order.begin() +
                    static_cast<std::ptrdiff_t>(std::min(start + hp.batch_size, n)));
            const Matrix batch = gather_rows(train_x, batch_idx);
            std::vector<int> labels(batch_idx.size());
            for (std::size_t i = 0; i < batch_idx.size(); ++i)
                labels[i] = train.labels[batch_idx[i]];

            std::vector<Matrix> masks(model.layers.size() - 1);
            if (hp.dropout_rate > 0.0) {
                const double keep_scale = 1.0 / (1.0 - hp.dropout_rate);
                for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) {
                    masks[l] = Matrix(batch.rows, model.layers[l].weights.rows);
                    for (double& v : masks[l].data)
                        v = dropout_rng.uniform() < hp.dropout_rate ? 0.0 : keep_scale;
                }
            }

            const ForwardState state = forward(model, batch, &masks);
            const double loss =
                data_loss(state.probs, labels) + 0.5 * hp.lambda * model.sum_squared_weights();
            if (!std::isfinite(loss))
                throw divergence_error("mlp training loss went non-finite at epoch " +
                                       std::to_string(epoch));
            epoch_loss += loss;
            ++n_batches;

            const MlpGradients grads = backward(model, state, labels, hp.lambda, &masks);
            ++adam_t;
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                adam_update(model.layers[l].weights, m_state[l].weights, v_state[l].weights,
                            grads.layers[l].weights);
                const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(adam_t));
                const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(adam_t));
                for (std::size_t i = 0; i < model.layers[l].biases.size(); ++i) {
                    double& mb = m_state[l].biases[i];
                    double& vb = v_state[l].biases[i];
                    const double gb = grads.layers[l].biases[i];
                    mb = hp.beta1 * mb + (1.0 - hp.beta1) * gb;
                    vb = hp.beta2 * vb + (1.0 - hp.beta2) * gb * gb;
                    model.layers[l].biases[i] -=
                        hp.learning_rate * (mb / bc1) / (std::sqrt(vb / bc2) + hp.epsilon);
                }
            }
        }

        // validation pass, dropout disabled
        const ForwardState val_state = forward(model, val_x, nullptr);
        const double val_loss = data_loss(val_state.probs, val.labels);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < val_x.rows; ++i) {
            const double* row = val_state.probs.row(i);
            const std::size_t pred = static_cast<std::size_t>(
                std::max_element(row, row + val_state.probs.cols) - row);
            if (static_cast<int>(pred) == val.labels[i])
                ++correct;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(n_batches);
        stats.val_loss = val_loss;
        stats.val_accuracy = static_cast<double>(correct) / static_cast<double>(val_x.rows);
        model.history.push_back(stats);

        if (val_loss < best_val_loss) {
            best_val_loss = val_loss;
            best_epoch = epoch;
            best_layers = model.layers;
        }
    }

    model.layers = std::move(best_layers);
    model.selected_epoch = best_epoch;
    return model;
}

} // namespace mgc
