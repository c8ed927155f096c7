#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgc/dataset.hpp"
#include "mgc/tree.hpp"

namespace mgc {

struct GbtHp {
    std::size_t rounds = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_samples_split = 2;
};

/// Multiclass softmax boosting: each round fits one squared-error regression
/// tree per class to the residual (y_c - p_c), with Newton leaf steps scaled
/// by the learning rate. Leaf values are stored pre-scaled, so prediction is
/// a plain sum over trees.
struct GbtModel {
    std::vector<std::vector<DecisionTree>> rounds; // rounds x n_classes
    std::vector<std::size_t> split_counts;         // decision nodes per feature
    std::vector<double> train_loss_history;        // softmax loss after each round
    std::vector<std::string> class_names;
    std::size_t feature_dim = 0;
    GbtHp hp;

    std::vector<double> raw_scores(const double* x, std::size_t d) const;
    std::vector<double> predict_proba(const double* x, std::size_t d) const;
    int predict(const double* x, std::size_t d) const;
    std::size_t total_internal_nodes() const;
};

GbtModel train_gbt(const Dataset& train, const Dataset& val, const GbtHp& hp = {});

/// Split counts sorted descending, ties broken by feature index.
std::vector<std::pair<std::size_t, std::size_t>> feature_importance(const GbtModel& model);

} // namespace mgc
