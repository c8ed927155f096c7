#include "mgc/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mgc/classifier_common.hpp"
#include "mgc/error.hpp"

namespace mgc {

namespace {

/// Depth-limited squared-error regression tree over per-sample gradients and
/// hessians; leaves carry the Newton step sum(g)/(sum(h) + eps) scaled by the
/// learning rate.
struct RegressionTreeBuilder {
    const Matrix& features;
    const std::vector<double>& gradients;
    const std::vector<double>& hessians;
    std::size_t max_depth;
    std::size_t min_samples_split;
    double learning_rate;
    std::vector<std::size_t>& split_counts;
    DecisionTree tree;

    std::uint32_t make_leaf(const std::vector<std::size_t>& indices) {
        double g = 0.0, h = 0.0;
        for (std::size_t i : indices) {
            g += gradients[i];
            h += hessians[i];
        }
        TreeNode leaf;
        leaf.value = learning_rate * g / (h + 1e-12);
        tree.nodes.push_back(leaf);
        return static_cast<std::uint32_t>(tree.nodes.size() - 1);
    }

    std::uint32_t build(std::vector<std::size_t>& indices, std::size_t depth) {
        if (depth >= max_depth || indices.size() < min_samples_split)
            return make_leaf(indices);

        // variance reduction == maximizing sum_l^2/n_l + sum_r^2/n_r
        double total_sum = 0.0;
        for (std::size_t i : indices)
            total_sum += gradients[i];
        const double parent_score =
            total_sum * total_sum / static_cast<double>(indices.size());

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = parent_score + 1e-12;

        std::vector<std::size_t> sorted = indices;
        for (std::size_t f = 0; f < features.cols; ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return features(a, f) < features(b, f);
            });
            double left_sum = 0.0;
            for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
                left_sum += gradients[sorted[pos]];
                const double v0 = features(sorted[pos], f);
                const double v1 = features(sorted[pos + 1], f);
                if (v0 == v1)
                    continue;
                const double nl = static_cast<double>(pos + 1);
                const double nr = static_cast<double>(sorted.size() - pos - 1);
                const double right_sum = total_sum - left_sum;
                const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
                if (score > best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (v0 + v1);
                }
            }
        }
        if (best_feature < 0)
            return make_leaf(indices);

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : indices) {
            if (features(i, static_cast<std::size_t>(best_feature)) <= best_threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        if (left_idx.empty() || right_idx.empty())
            return make_leaf(indices);

        ++split_counts[static_cast<std::size_t>(best_feature)];
        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        const std::uint32_t self = static_cast<std::uint32_t>(tree.nodes.size() - 1);
        tree.nodes[self].left = build(left_idx, depth + 1);
        tree.nodes[self].right = build(right_idx, depth + 1);
        return self;
    }
};

} // namespace

std::vector<double> GbtModel::raw_scores(const double* x, std::size_t d) const {
    if (d != feature_dim)
        throw param_error("gbt dimension mismatch");
    std::vector<double> scores(class_names.size(), 0.0);
    for (const auto& round : rounds)
        for (std::size_t c = 0; c < round.size(); ++c)
            scores[c] += round[c].predict(x);
    return scores;
}

std::vector<double> GbtModel::predict_proba(const double* x, std::size_t d) const {
    return softmax(raw_scores(x, d));
}

int GbtModel::predict(const double* x, std::size_t d) const {
    return argmax(raw_scores(x, d));
}

std::size_t GbtModel::total_internal_nodes() const {
    std::size_t count = 0;
    for (const auto& round : rounds)
        for (const DecisionTree& t : round)
            count += t.internal_node_count();
    return count;
}

GbtModel train_gbt(const Dataset& train, const Dataset& val, const GbtHp& hp) {
    (void)val; // fixed round count, no early stopping
    train.validate();
    const std::size_t n = train.size();
    const std::size_t d = train.feature_dim();
    const std::size_t n_classes = train.class_names.size();

    GbtModel model;
    model.hp = hp;
    model.class_names = train.class_names;
    model.feature_dim = d;
    model.split_counts.assign(d, 0);

    Matrix scores(n, n_classes); // current F_c(x_i), initialized to 0
    std::vector<std::size_t> all_indices(n);
    std::iota(all_indices.begin(), all_indices.end(), 0);

    std::vector<double> grad(n), hess(n);
    for (std::size_t round = 0; round < hp.rounds; ++round) {
        Matrix probs(n, n_classes);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> p =
                softmax({scores.row(i), scores.row(i) + n_classes});
            std::copy(p.begin(), p.end(), probs.row(i));
        }

        std::vector<DecisionTree> round_trees;
        round_trees.reserve(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double y = train.labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
                const double p = probs(i, c);
                grad[i] = y - p;
                hess[i] = p * (1.0 - p);
            }
            RegressionTreeBuilder builder{train.features,       grad,
                                          hess,                 hp.max_depth,
                                          hp.min_samples_split, hp.learning_rate,
                                          model.split_counts,   {}};
            std::vector<std::size_t> indices = all_indices;
            builder.build(indices, 0);
            round_trees.push_back(std::move(builder.tree));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < n_classes; ++c)
                scores(i, c) += round_trees[c].predict(train.features.row(i));
        model.rounds.push_back(std::move(round_trees));

        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double> p =
                softmax({scores.row(i), scores.row(i) + n_classes});
            loss += -std::log(std::max(p[static_cast<std::size_t>(train.labels[i])], 1e-12));
        }
        model.train_loss_history.push_back(loss / static_cast<double>(n));
    }
    return model;
}

std::vector<std::pair<std::size_t, std::size_t>> feature_importance(const GbtModel& model) {
    std::vector<std::pair<std::size_t, std::size_t>> ranked;
    ranked.reserve(model.split_counts.size());
    for (std::size_t f = 0; f < model.split_counts.size(); ++f)
        ranked.emplace_back(f, model.split_counts[f]);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return ranked;
}

} // namespace mgc
