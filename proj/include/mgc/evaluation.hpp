#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgc/dataset.hpp"
#include "mgc/gbt.hpp"

namespace mgc {

/// Disjoint train/validation/test partition of [0, n).
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

/// Seeded Fisher-Yates shuffle of [0, n); first train_frac to train, next
/// val_frac to validation, remainder to test. Requires n >= 20.
SplitIndices split(std::size_t n, std::uint64_t seed, double train_frac = 0.90,
                   double val_frac = 0.05);

/// counts(i, j) = test instances of true class i predicted as class j.
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::size_t> counts;

    explicit ConfusionMatrix(std::size_t classes = 0)
        : n_classes(classes), counts(classes * classes, 0) {}

    std::size_t& at(std::size_t i, std::size_t j) { return counts[i * n_classes + j]; }
    std::size_t at(std::size_t i, std::size_t j) const { return counts[i * n_classes + j]; }
    std::size_t total() const;
    std::size_t trace() const;
};

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels,
                          std::size_t n_classes);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

/// Per-class F = 2PR/(P+R) (0 when P+R = 0), averaged unweighted over all
/// classes.
double macro_f_score(const ConfusionMatrix& cm);

struct RocCurve {
    std::vector<std::pair<double, double>> points; // (fpr, tpr), (0,0) .. (1,1)
};

struct RocResult {
    std::vector<RocCurve> curves;       // one per class (empty if skipped)
    std::vector<double> per_class_auc;  // 0 placeholder for skipped classes
    std::vector<bool> evaluated;        // false when a class had no pos or neg
    double macro_auc = 0.0;             // mean over evaluated classes
};

/// One-vs-rest ROC per class from scores[i][c]; AUC by the Mann-Whitney rank
/// statistic with ties counted half. Classes without both a positive and a
/// negative example are skipped (not an error).
RocResult roc_and_auc(const std::vector<std::vector<double>>& scores,
                      const std::vector<int>& labels, std::size_t n_classes);

/// Element-wise mean of >= 1 member distributions for one example.
std::vector<double> ensemble(const std::vector<std::vector<double>>& member_distributions);

struct EvaluationReport {
    double accuracy = 0.0;
    double macro_f = 0.0;
    double macro_auc = 0.0;
    ConfusionMatrix confusion_matrix;
    RocResult roc;
};

/// Full metric set from per-example probability distributions.
EvaluationReport evaluate_scores(const std::vector<std::vector<double>>& scores,
                                 const std::vector<int>& labels, std::size_t n_classes);

struct AblationRow {
    std::size_t n_features = 0;
    double auc = 0.0;
    double accuracy = 0.0;
};

/// Retrains GBT on the top-N columns of `ranking` for each N and evaluates on
/// test. N values larger than the feature count are clamped (with a warning
/// to stderr).
std::vector<AblationRow> ablate_top_n(const Dataset& train, const Dataset& val,
                                      const Dataset& test,
                                      const std::vector<std::size_t>& ranking,
                                      const std::vector<std::size_t>& n_values,
                                      const GbtHp& hp = {});

struct DomainRow {
    std::string feature_set;
    double auc = 0.0;
    double accuracy = 0.0;
};

/// Trains GBT on time-domain columns (0..8), frequency-domain columns
/// (9..92) and all columns, with identical hyperparameters.
std::vector<DomainRow> domain_comparison(const Dataset& train, const Dataset& val,
                                         const Dataset& test, const GbtHp& hp = {});

} // namespace mgc
