#include "mgc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "mgc/error.hpp"
#include "mgc/features.hpp"
#include "mgc/rng.hpp"

namespace mgc {

SplitIndices split(std::size_t n, std::uint64_t seed, double train_frac, double val_frac) {
    if (n < 20)
        throw param_error("split needs at least 20 examples, got " + std::to_string(n));
    if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac >= 1.0)
        throw param_error("split fractions must satisfy 0 < train, 0 <= val, train+val < 1");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, 0x73706c69)); // split stream
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.bounded(i + 1)]);

    const std::size_t n_train = static_cast<std::size_t>(train_frac * static_cast<double>(n));
    const std::size_t n_val = static_cast<std::size_t>(val_frac * static_cast<double>(n));

    SplitIndices out;
    out.seed = seed;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                          order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
    return out;
}

std::size_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < n_classes; ++i)
        t += at(i, i);
    return t;
}

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels,
                          std::size_t n_classes) {
    if (predictions.size() != labels.size())
        throw param_error("confusion: predictions/labels length mismatch");
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const std::size_t t = static_cast<std::size_t>(labels[i]);
        const std::size_t p = static_cast<std::size_t>(predictions[i]);
        if (t >= n_classes || p >= n_classes)
            throw param_error("confusion: class index out of range");
        ++cm.at(t, p);
    }
    return cm;
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty() || predictions.size() != labels.size())
        throw param_error("accuracy: empty or mismatched inputs");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double macro_f_score(const ConfusionMatrix& cm) {
    double sum_f = 0.0;
    for (std::size_t c = 0; c < cm.n_classes; ++c) {
        std::size_t tp = cm.at(c, c);
        std::size_t fp = 0, fn = 0;
        for (std::size_t other = 0; other < cm.n_classes; ++other) {
            if (other == c)
                continue;
            fp += cm.at(other, c);
            fn += cm.at(c, other);
        }
        const double precision =
            tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double recall =
            tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        sum_f += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                          : 0.0;
    }
    return sum_f / static_cast<double>(cm.n_classes);
}

namespace {

/// AUC via average ranks (Mann-Whitney); tied scores get tied ranks, which
/// counts crossings at equal scores as half.
double rank_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]])
            ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg_rank;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (positive[k]) {
            pos_rank_sum += ranks[k];
            ++n_pos;
        }
    const std::size_t n_neg = n - n_pos;
    return (pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::size_t n_pos = 0;
    for (bool p : positive)
        if (p)
            ++n_pos;
    const std::size_t n_neg = n - n_pos;

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        // sweep one distinct threshold at a time so ties move diagonally
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            if (positive[order[j]])
                ++tp;
            else
                ++fp;
            ++j;
        }
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                                  static_cast<double>(tp) / static_cast<double>(n_pos));
        i = j;
    }
    return curve;
}

} // namespace

RocResult roc_and_auc(const std::vector<std::vector<double>>& scores,
                      const std::vector<int>& labels, std::size_t n_classes) {
    if (scores.empty() || scores.size() != labels.size())
        throw param_error("roc_and_auc: empty or mismatched inputs");

    RocResult out;
    out.curves.resize(n_classes);
    out.per_class_auc.assign(n_classes, 0.0);
    out.evaluated.assign(n_classes, false);

    double auc_sum = 0.0;
    std::size_t n_evaluated = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<double> class_scores(scores.size());
        std::vector<bool> positive(scores.size());
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            class_scores[i] = scores[i][c];
            positive[i] = labels[i] == static_cast<int>(c);
            if (positive[i])
                ++n_pos;
        }
        if (n_pos == 0 || n_pos == scores.size())
            continue; // skipped, reported via `evaluated`
        out.curves[c] = roc_curve(class_scores, positive);
        out.per_class_auc[c] = rank_auc(class_scores, positive);
        out.evaluated[c] = true;
        auc_sum += out.per_class_auc[c];
        ++n_evaluated;
    }
    out.macro_auc = n_evaluated > 0 ? auc_sum / static_cast<double>(n_evaluated) : 0.0;
    return out;
}

std::vector<double> ensemble(const std::vector<std::vector<double>>& member_distributions) {
    if (member_distributions.empty())
        throw param_error("ensemble needs at least one member distribution");
    const std::size_t n_classes = member_distributions.front().size();
    // mean as first + average deviation, so identical members reproduce
    // their distribution bit-exactly
    std::vector<double> deviation(n_classes, 0.0);
    for (const auto& dist : member_distributions) {
        if (dist.size() != n_classes)
            throw param_error("ensemble member distributions disagree on class count");
        for (std::size_t c = 0; c < n_classes; ++c)
            deviation[c] += dist[c] - member_distributions.front()[c];
    }
    std::vector<double> mean(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        mean[c] = member_distributions.front()[c] +
                  deviation[c] / static_cast<double>(member_distributions.size());
    return mean;
}

EvaluationReport evaluate_scores(const std::vector<std::vector<double>>& scores,
                                 const std::vector<int>& labels, std::size_t n_classes) {
    std::vector<int> predictions(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        predictions[i] = static_cast<int>(
            std::max_element(scores[i].begin(), scores[i].end()) - scores[i].begin());

    EvaluationReport report;
    report.confusion_matrix = confusion(predictions, labels, n_classes);
    report.accuracy = accuracy(predictions, labels);
    report.macro_f = macro_f_score(report.confusion_matrix);
    report.roc = roc_and_auc(scores, labels, n_classes);
    report.macro_auc = report.roc.macro_auc;
    return report;
}

namespace {

std::pair<double, double> gbt_test_metrics(const Dataset& train, const Dataset& val,
                                           const Dataset& test, const GbtHp& hp) {
    const GbtModel model = train_gbt(train, val, hp);
    std::vector<std::vector<double>> scores(test.size());
    for (std::size_t i = 0; i < test.size(); ++i)
        scores[i] = model.predict_proba(test.features.row(i), test.feature_dim());
    const EvaluationReport report =
        evaluate_scores(scores, test.labels, test.class_names.size());
    return {report.macro_auc, report.accuracy};
}

} // namespace

std::vector<AblationRow> ablate_top_n(const Dataset& train, const Dataset& val,
                                      const Dataset& test,
                                      const std::vector<std::size_t>& ranking,
                                      const std::vector<std::size_t>& n_values,
                                      const GbtHp& hp) {
    std::vector<AblationRow> rows;
    for (std::size_t requested : n_values) {
        std::size_t n = requested;
        if (n > ranking.size()) {
            std::cerr << "ablation: clamping N=" << requested << " to " << ranking.size()
                      << " available features\n";
            n = ranking.size();
        }
        // keep the surviving columns in canonical order so N = feature_dim
        // reproduces the full model exactly
        std::vector<std::size_t> columns(ranking.begin(),
                                         ranking.begin() + static_cast<std::ptrdiff_t>(n));
        std::sort(columns.begin(), columns.end());
        const auto [auc, acc] = gbt_test_metrics(train.select_features(columns),
                                                 val.select_features(columns),
                                                 test.select_features(columns), hp);
        rows.push_back({requested > n ? n : requested, auc, acc});
    }
    return rows;
}

std::vector<DomainRow> domain_comparison(const Dataset& train, const Dataset& val,
                                         const Dataset& test, const GbtHp& hp) {
    if (train.feature_dim() != kFeatureDim)
        throw param_error("domain comparison expects the canonical " +
                          std::to_string(kFeatureDim) + "-feature layout");

    std::vector<std::size_t> time_cols(kTimeDomainFeatures);
    std::iota(time_cols.begin(), time_cols.end(), 0);
    std::vector<std::size_t> freq_cols(kFeatureDim - kTimeDomainFeatures);
    std::iota(freq_cols.begin(), freq_cols.end(), kTimeDomainFeatures);
    std::vector<std::size_t> all_cols(kFeatureDim);
    std::iota(all_cols.begin(), all_cols.end(), 0);

    std::vector<DomainRow> rows;
    for (const auto& [name, cols] :
         std::vector<std::pair<std::string, const std::vector<std::size_t>*>>{
             {"time", &time_cols}, {"frequency", &freq_cols}, {"both", &all_cols}}) {
        const auto [auc, acc] =
            gbt_test_metrics(train.select_features(*cols), val.select_features(*cols),
                             test.select_features(*cols), hp);
        rows.push_back({name, auc, acc});
    }
    return rows;
}

} // namespace mgc
