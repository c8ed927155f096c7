#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgc/dataset.hpp"
#include "mgc/tree.hpp"

namespace mgc {

struct RandomForestHp {
    std::size_t n_trees = 200;
    std::size_t max_depth = 20;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;
};

/// Bagged Gini-impurity decision trees; each split considers ceil(sqrt(d))
/// randomly chosen features. Leaves store the majority class; the forest
/// probability is the fraction of trees voting for each class.
struct RandomForestModel {
    std::vector<DecisionTree> trees;
    std::vector<std::string> class_names;
    std::size_t feature_dim = 0;
    RandomForestHp hp;

    std::vector<double> predict_proba(const double* x, std::size_t d) const;
    int predict(const double* x, std::size_t d) const;
};

/// Deterministic per (train, hp.seed); per-tree seeds derive from the master
/// seed, so tree construction order is schedule-independent.
RandomForestModel train_random_forest(const Dataset& train, const RandomForestHp& hp = {});

} // namespace mgc
