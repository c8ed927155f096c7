#include "mgc/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mgc/classifier_common.hpp"
#include "mgc/error.hpp"
#include "mgc/rng.hpp"

namespace mgc {

namespace {

struct TreeBuilder {
    const Matrix& features;
    const std::vector<int>& labels;
    std::size_t n_classes;
    std::size_t max_depth;
    std::size_t min_samples_split;
    std::size_t features_per_split;
    Rng& rng;
    DecisionTree tree;

    double gini(const std::vector<std::size_t>& counts, std::size_t total) const {
        double g = 1.0;
        for (std::size_t c : counts) {
            const double p = static_cast<double>(c) / static_cast<double>(total);
            g -= p * p;
        }
        return g;
    }

    std::uint32_t make_leaf(const std::vector<std::size_t>& counts) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c)
            if (counts[c] > counts[best])
                best = c;
        TreeNode leaf;
        leaf.value = static_cast<double>(best);
        tree.nodes.push_back(leaf);
        return static_cast<std::uint32_t>(tree.nodes.size() - 1);
    }

    // Fisher-Yates prefix: the first features_per_split entries of a shuffled
    // feature index list.
    std::vector<int> sample_features() {
        std::vector<int> all(features.cols);
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t i = 0; i < features_per_split && i + 1 < all.size(); ++i) {
            const std::size_t j = i + rng.bounded(all.size() - i);
            std::swap(all[i], all[j]);
        }
        all.resize(std::min(features_per_split, all.size()));
        return all;
    }

    std::uint32_t build(std::vector<std::size_t>& indices, std::size_t depth) {
        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t i : indices)
            ++counts[static_cast<std::size_t>(labels[i])];
        const bool pure =
            std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        if (pure || depth >= max_depth || indices.size() < min_samples_split)
            return make_leaf(counts);

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = std::numeric_limits<double>::infinity();

        std::vector<std::size_t> sorted = indices;
        for (int f : sample_features()) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return features(a, static_cast<std::size_t>(f)) <
                       features(b, static_cast<std::size_t>(f));
            });
            std::vector<std::size_t> left(n_classes, 0);
            std::vector<std::size_t> right = counts;
            for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
                const std::size_t cls = static_cast<std::size_t>(labels[sorted[pos]]);
                ++left[cls];
                --right[cls];
                const double v0 = features(sorted[pos], static_cast<std::size_t>(f));
                const double v1 = features(sorted[pos + 1], static_cast<std::size_t>(f));
                if (v0 == v1)
                    continue;
                const std::size_t nl = pos + 1;
                const std::size_t nr = sorted.size() - nl;
                const double impurity =
                    (static_cast<double>(nl) * gini(left, nl) +
                     static_cast<double>(nr) * gini(right, nr)) /
                    static_cast<double>(sorted.size());
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = 0.5 * (v0 + v1);
                }
            }
        }
        if (best_feature < 0)
            return make_leaf(counts); // all sampled features constant

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : indices) {
            if (features(i, static_cast<std::size_t>(best_feature)) <= best_threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        if (left_idx.empty() || right_idx.empty())
            return make_leaf(counts);

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

std::vector<double> RandomForestModel::predict_proba(const double* x, std::size_t d) const {
    if (d != feature_dim)
        throw param_error("random forest dimension mismatch");
    std::vector<double> votes(class_names.size(), 0.0);
    for (const DecisionTree& t : trees)
        votes[static_cast<std::size_t>(t.predict(x))] += 1.0;
    for (double& v : votes)
        v /= static_cast<double>(trees.size());
    return votes;
}

int RandomForestModel::predict(const double* x, std::size_t d) const {
    return argmax(predict_proba(x, d));
}

RandomForestModel train_random_forest(const Dataset& train, const RandomForestHp& hp) {
    train.validate();
    const std::size_t n = train.size();
    const std::size_t d = train.feature_dim();
    const std::size_t per_split =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    RandomForestModel model;
    model.hp = hp;
    model.class_names = train.class_names;
    model.feature_dim = d;
    model.trees.reserve(hp.n_trees);

    for (std::size_t t = 0; t < hp.n_trees; ++t) {
        Rng rng(mix_seed(hp.seed, t));
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i)
            bootstrap[i] = rng.bounded(n);

        TreeBuilder builder{train.features,       train.labels,
                            train.class_names.size(), hp.max_depth,
                            hp.min_samples_split, per_split,
                            rng,                  {}};
        builder.build(bootstrap, 0);
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

} // namespace mgc
