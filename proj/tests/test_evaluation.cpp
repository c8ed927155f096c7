#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "mgc/error.hpp"
#include "mgc/evaluation.hpp"
#include "mgc/rng.hpp"

using namespace mgc;

namespace {

// feature matrix where the label is encoded in the first `informative`
// columns; the rest is noise
Dataset spectral_style_dataset(std::size_t n, std::size_t dim, std::size_t informative,
                               std::size_t n_classes, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    for (std::size_t c = 0; c < n_classes; ++c)
        ds.class_names.push_back("class" + std::to_string(c));
    ds.features = Matrix(n, dim);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % n_classes);
        ds.labels[i] = label;
        for (std::size_t d = 0; d < dim; ++d)
            ds.features(i, d) = rng.uniform(-1.0, 1.0);
        for (std::size_t d = 0; d < informative; ++d)
            ds.features(i, d) += 2.0 * static_cast<double>(label);
    }
    return ds;
}

} // namespace

TEST_CASE("split") {
    SUBCASE("n=100 gives 90/5/5") {
        const auto idx = split(100, 4242);
        CHECK(idx.train.size() == 90);
        CHECK(idx.validation.size() == 5);
        CHECK(idx.test.size() == 5);
    }
    SUBCASE("same seed gives identical indices") {
        const auto a = split(57, 9);
        const auto b = split(57, 9);
        CHECK(a.train == b.train);
        CHECK(a.validation == b.validation);
        CHECK(a.test == b.test);
    }
    SUBCASE("partition property over random (n, seed)") {
        Rng rng(1);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 20 + rng.bounded(500);
            const std::uint64_t seed = rng.next_u64();
            const auto idx = split(n, seed);
            std::set<std::size_t> all;
            for (const auto* part : {&idx.train, &idx.validation, &idx.test})
                for (std::size_t i : *part) {
                    CHECK(i < n);
                    CHECK(all.insert(i).second); // no duplicates
                }
            CHECK(all.size() == n);
        }
    }
    SUBCASE("n below 20 is an error") {
        CHECK_THROWS_AS(split(19, 1), param_error);
    }
}

TEST_CASE("accuracy and macro F") {
    SUBCASE("all correct") {
        const std::vector<int> labels = {0, 1, 2, 3, 4, 5, 6};
        CHECK(accuracy(labels, labels) == doctest::Approx(1.0));
        CHECK(macro_f_score(confusion(labels, labels, 7)) == doctest::Approx(1.0));
    }
    SUBCASE("binary case TP=1 FP=1 FN=1 gives F 0.5") {
        // class 0: one true positive, one false positive, one false negative
        const std::vector<int> labels = {0, 1, 0};
        const std::vector<int> preds = {0, 0, 1};
        const auto cm = confusion(preds, labels, 2);
        CHECK(cm.at(0, 0) == 1);
        CHECK(cm.at(1, 0) == 1);
        CHECK(cm.at(0, 1) == 1);
        // per-class F: class 0 -> 0.5, class 1 -> 0; macro = 0.25
        CHECK(macro_f_score(cm) == doctest::Approx(0.25));
    }
    SUBCASE("random predictions match a brute-force per-class oracle") {
        Rng rng(2);
        const std::size_t n_classes = 7;
        std::vector<int> labels(500), preds(500);
        for (std::size_t i = 0; i < 500; ++i) {
            labels[i] = static_cast<int>(rng.bounded(n_classes));
            preds[i] = static_cast<int>(rng.bounded(n_classes));
        }
        const auto cm = confusion(preds, labels, n_classes);

        double f_sum = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < 500; ++i) {
                const bool is_c = labels[i] == static_cast<int>(c);
                const bool pred_c = preds[i] == static_cast<int>(c);
                if (is_c && pred_c)
                    ++tp;
                else if (!is_c && pred_c)
                    ++fp;
                else if (is_c && !pred_c)
                    ++fn;
            }
            const double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
            const double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
            f_sum += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
        }
        CHECK(macro_f_score(cm) == doctest::Approx(f_sum / 7.0).epsilon(1e-12));
        CHECK(accuracy(preds, labels) ==
              doctest::Approx(static_cast<double>(cm.trace()) / cm.total()));
    }
    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(accuracy({}, {}), param_error);
    }
}

TEST_CASE("confusion matrix") {
    SUBCASE("single example lands in counts[true][pred]") {
        const auto cm = confusion({5}, {2}, 7);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j)
                CHECK(cm.at(i, j) == ((i == 2 && j == 5) ? 1 : 0));
        CHECK(cm.total() == 1);
        CHECK(cm.trace() == 0);
    }
    SUBCASE("trace over total equals accuracy on random inputs") {
        Rng rng(33);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<int> labels(100), preds(100);
            for (std::size_t i = 0; i < 100; ++i) {
                labels[i] = static_cast<int>(rng.bounded(7));
                preds[i] = static_cast<int>(rng.bounded(7));
            }
            const auto cm = confusion(preds, labels, 7);
            CHECK(accuracy(preds, labels) ==
                  doctest::Approx(static_cast<double>(cm.trace()) /
                                  static_cast<double>(cm.total())));
        }
    }
}

TEST_CASE("roc and auc") {
    SUBCASE("perfect separation gives AUC 1, inverted gives 0") {
        std::vector<std::vector<double>> scores;
        std::vector<int> labels;
        for (int i = 0; i < 10; ++i) {
            const bool positive = i < 5;
            labels.push_back(positive ? 0 : 1);
            scores.push_back(positive ? std::vector<double>{0.9, 0.1}
                                      : std::vector<double>{0.2, 0.8});
        }
        const auto result = roc_and_auc(scores, labels, 2);
        CHECK(result.per_class_auc[0] == doctest::Approx(1.0));
        CHECK(result.per_class_auc[1] == doctest::Approx(1.0));
        CHECK(result.macro_auc == doctest::Approx(1.0));

        // invert the class-0 scores
        for (auto& s : scores)
            s = {1.0 - s[0], s[1]};
        const auto inverted = roc_and_auc(scores, labels, 2);
        CHECK(inverted.per_class_auc[0] == doctest::Approx(0.0));
    }
    SUBCASE("label-independent scores hover near 0.5") {
        Rng rng(44);
        std::vector<std::vector<double>> scores;
        std::vector<int> labels;
        for (int i = 0; i < 1000; ++i) {
            const double s = rng.uniform();
            scores.push_back({s, 1.0 - s});
            labels.push_back(static_cast<int>(rng.bounded(2)));
        }
        const auto result = roc_and_auc(scores, labels, 2);
        CHECK(std::abs(result.per_class_auc[0] - 0.5) < 0.05);
    }
    SUBCASE("AUC is invariant under strictly increasing transforms") {
        Rng rng(45);
        std::vector<std::vector<double>> scores, warped;
        std::vector<int> labels;
        for (int i = 0; i < 200; ++i) {
            const double s = rng.uniform();
            scores.push_back({s});
            warped.push_back({std::exp(3.0 * s) + 7.0});
            labels.push_back(rng.uniform() < 0.3 + 0.4 * s ? 0 : 1);
        }
        // single pseudo-class column: score for class 0
        const auto a = roc_and_auc(scores, labels, 1);
        const auto b = roc_and_auc(warped, labels, 1);
        CHECK(a.per_class_auc[0] == doctest::Approx(b.per_class_auc[0]).epsilon(1e-12));
    }
    SUBCASE("curves are monotone from (0,0) to (1,1)") {
        Rng rng(46);
        std::vector<std::vector<double>> scores;
        std::vector<int> labels;
        for (int i = 0; i < 300; ++i) {
            const double s = rng.uniform();
            scores.push_back({s, 1.0 - s});
            labels.push_back(rng.uniform() < s ? 0 : 1);
        }
        const auto result = roc_and_auc(scores, labels, 2);
        for (std::size_t c = 0; c < 2; ++c) {
            const auto& points = result.curves[c].points;
            REQUIRE(!points.empty());
            CHECK(points.front().first == doctest::Approx(0.0));
            CHECK(points.front().second == doctest::Approx(0.0));
            CHECK(points.back().first == doctest::Approx(1.0));
            CHECK(points.back().second == doctest::Approx(1.0));
            for (std::size_t i = 1; i < points.size(); ++i) {
                CHECK(points[i].first >= points[i - 1].first);
                CHECK(points[i].second >= points[i - 1].second);
            }
        }
    }
    SUBCASE("classes without positives are skipped and reported") {
        std::vector<std::vector<double>> scores = {{0.5, 0.3, 0.2}, {0.1, 0.8, 0.1}};
        std::vector<int> labels = {0, 1}; // class 2 never appears
        const auto result = roc_and_auc(scores, labels, 3);
        CHECK(result.evaluated[0]);
        CHECK(result.evaluated[1]);
        CHECK_FALSE(result.evaluated[2]);
    }
}

TEST_CASE("ensemble") {
    SUBCASE("identical members are the identity") {
        const std::vector<double> p = {0.2, 0.3, 0.5};
        CHECK(ensemble({p, p, p}) == p);
    }
    SUBCASE("two one-hot members average to a half-half split") {
        const auto out = ensemble({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
        CHECK(out[0] == doctest::Approx(0.5));
        CHECK(out[1] == doctest::Approx(0.5));
        CHECK(out[2] == doctest::Approx(0.0));
    }
    SUBCASE("mean of valid distributions stays a valid distribution") {
        Rng rng(47);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::vector<double>> members;
            const std::size_t k = 2 + rng.bounded(4);
            for (std::size_t m = 0; m < k; ++m) {
                std::vector<double> logits(7);
                for (double& v : logits)
                    v = rng.uniform(-2.0, 2.0);
                double sum = 0.0;
                for (double& v : logits) {
                    v = std::exp(v);
                    sum += v;
                }
                for (double& v : logits)
                    v /= sum;
                members.push_back(logits);
            }
            const auto out = ensemble(members);
            double sum = 0.0;
            for (double v : out)
                sum += v;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("class-count mismatch is an error") {
        CHECK_THROWS_AS(ensemble({{0.5, 0.5}, {0.3, 0.3, 0.4}}), param_error);
    }
}

TEST_CASE("ablation and domain comparison on constructed data") {
    const auto ds = spectral_style_dataset(210, 93, 5, 3, 99);
    const auto idx = split(ds.size(), 5);
    const auto train = ds.subset(idx.train);
    const auto val = ds.subset(idx.validation);
    const auto test = ds.subset(idx.test);

    GbtHp hp;
    hp.rounds = 25;

    SUBCASE("N = feature_dim reproduces the full model exactly") {
        const GbtModel full = train_gbt(train, val, hp);
        std::vector<std::size_t> ranking;
        for (const auto& [f, c] : feature_importance(full))
            ranking.push_back(f);

        const auto rows = ablate_top_n(train, val, test, ranking, {93}, hp);
        REQUIRE(rows.size() == 1);

        std::vector<std::vector<double>> full_scores(test.size());
        for (std::size_t i = 0; i < test.size(); ++i)
            full_scores[i] = full.predict_proba(test.features.row(i), 93);
        const auto report = evaluate_scores(full_scores, test.labels, 3);
        CHECK(rows[0].auc == report.macro_auc);
        CHECK(rows[0].accuracy == report.accuracy);
    }
    SUBCASE("more informative features never hurt badly") {
        const GbtModel full = train_gbt(train, val, hp);
        std::vector<std::size_t> ranking;
        for (const auto& [f, c] : feature_importance(full))
            ranking.push_back(f);
        const auto rows = ablate_top_n(train, val, test, ranking, {1, 5}, hp);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].auc >= rows[0].auc - 1e-9);
    }
    SUBCASE("oversized N is clamped") {
        std::vector<std::size_t> ranking(93);
        for (std::size_t i = 0; i < 93; ++i)
            ranking[i] = i;
        const auto rows = ablate_top_n(train, val, test, ranking, {200}, hp);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].n_features == 93);
    }
    SUBCASE("frequency-style features beat noise-only time columns") {
        // class identity lives in columns 0..4, which the canonical layout
        // maps into the time-domain block; move it into the frequency block
        // by rotating columns so the informative ones sit at 20..24.
        Dataset rotated = ds;
        for (std::size_t r = 0; r < ds.features.rows; ++r)
            for (std::size_t c = 0; c < 5; ++c) {
                std::swap(rotated.features(r, c + 20), rotated.features(r, c));
            }
        const auto r_train = rotated.subset(idx.train);
        const auto r_val = rotated.subset(idx.validation);
        const auto r_test = rotated.subset(idx.test);
        const auto rows = domain_comparison(r_train, r_val, r_test, hp);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].feature_set == "time");
        CHECK(rows[1].feature_set == "frequency");
        CHECK(rows[2].feature_set == "both");
        CHECK(rows[1].accuracy >= rows[0].accuracy);
        CHECK(rows[2].auc >= rows[1].auc - 0.02);
    }
}
