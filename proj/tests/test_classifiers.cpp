#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "mgc/classifier_common.hpp"
#include "mgc/error.hpp"
#include "mgc/gbt.hpp"
#include "mgc/logistic.hpp"
#include "mgc/mlp.hpp"
#include "mgc/model_io.hpp"
#include "mgc/random_forest.hpp"
#include "mgc/rng.hpp"

using namespace mgc;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                     const std::vector<int>& labels,
                     std::vector<std::string> class_names) {
    Dataset ds;
    ds.class_names = std::move(class_names);
    ds.labels = labels;
    ds.features = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(rows[r].begin(), rows[r].end(), ds.features.row(r));
    return ds;
}

// two clearly separated gaussian blobs in 2-d
Dataset separable_blobs(std::size_t n_per_class, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        rows.push_back({rng.normal(-2.0, 0.3), rng.normal(-2.0, 0.3)});
        labels.push_back(0);
        rows.push_back({rng.normal(2.0, 0.3), rng.normal(2.0, 0.3)});
        labels.push_back(1);
    }
    return make_dataset(rows, labels, {"a", "b"});
}

Dataset xor_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        const double y = rng.uniform(-1.0, 1.0);
        rows.push_back({x, y});
        labels.push_back((x > 0.0) != (y > 0.0) ? 1 : 0);
    }
    return make_dataset(rows, labels, {"same", "diff"});
}

// labels depend only on the given feature column; everything else is noise
Dataset single_informative_feature(std::size_t n, std::size_t dim, std::size_t informative,
                                   std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(dim);
        for (double& v : row)
            v = rng.uniform(-1.0, 1.0);
        const int label = i % 3;
        row[informative] = static_cast<double>(label) + rng.uniform(-0.2, 0.2);
        rows.push_back(std::move(row));
        labels.push_back(label);
    }
    return make_dataset(rows, labels, {"c0", "c1", "c2"});
}

void check_distribution(const std::vector<double>& p) {
    double sum = 0.0;
    for (double v : p) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("standardizer") {
    SUBCASE("two-point column maps to -1, 1") {
        Matrix m(2, 1);
        m(0, 0) = 2.0;
        m(1, 0) = 4.0;
        const auto s = fit_standardizer(m);
        const auto t = s.apply(m);
        CHECK(t(0, 0) == doctest::Approx(-1.0));
        CHECK(t(1, 0) == doctest::Approx(1.0));
    }
    SUBCASE("constant column is centered only") {
        Matrix m(3, 1, 5.0);
        const auto s = fit_standardizer(m);
        const auto t = s.apply(m);
        for (std::size_t r = 0; r < 3; ++r)
            CHECK(t(r, 0) == doctest::Approx(0.0));
    }
    SUBCASE("random matrix is standardized to mean 0, std 1") {
        Rng rng(8);
        Matrix m(500, 4);
        for (double& v : m.data)
            v = rng.uniform(-3.0, 9.0);
        const auto s = fit_standardizer(m);
        const auto t = s.apply(m);
        for (std::size_t c = 0; c < 4; ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < t.rows; ++r)
                mean += t(r, c);
            mean /= static_cast<double>(t.rows);
            double var = 0.0;
            for (std::size_t r = 0; r < t.rows; ++r)
                var += (t(r, c) - mean) * (t(r, c) - mean);
            var /= static_cast<double>(t.rows);
            CHECK(std::abs(mean) < 1e-10);
            CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("cross entropy") {
    CHECK(cross_entropy({1.0, 0.0}, 0) == doctest::Approx(0.0));
    CHECK(cross_entropy(std::vector<double>(7, 1.0 / 7.0), 3) ==
          doctest::Approx(std::log(7.0)).epsilon(1e-9));
    CHECK(cross_entropy(std::vector<double>(7, 1.0 / 7.0), 3) ==
          doctest::Approx(1.94591).epsilon(1e-5));

    SUBCASE("matches the direct formula on random pairs") {
        Rng rng(4);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> logits(7);
            for (double& v : logits)
                v = rng.uniform(-3.0, 3.0);
            const auto p = softmax(logits);
            const int label = static_cast<int>(rng.bounded(7));
            CHECK(cross_entropy(p, label) ==
                  doctest::Approx(-std::log(p[static_cast<std::size_t>(label)]))
                      .epsilon(1e-12));
        }
    }
    SUBCASE("batch mean plus L2 term") {
        const std::vector<std::vector<double>> dists = {{0.5, 0.5}, {0.9, 0.1}};
        const std::vector<int> labels = {0, 0};
        const double base = batch_cross_entropy(dists, labels);
        CHECK(base == doctest::Approx(0.5 * (-std::log(0.5) - std::log(0.9))));
        CHECK(batch_cross_entropy(dists, labels, 0.1, 4.0) ==
              doctest::Approx(base + 0.5 * 0.1 * 4.0));
    }
}

TEST_CASE("logistic one-vs-rest") {
    SUBCASE("separable data trains to >= 0.99 accuracy") {
        const auto train = separable_blobs(100, 31);
        const auto model = train_logistic_ovr(train, train);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < train.size(); ++i)
            if (model.predict(train.features.row(i), 2) == train.labels[i])
                ++correct;
        CHECK(static_cast<double>(correct) / static_cast<double>(train.size()) >= 0.99);
    }
    SUBCASE("single-class training predicts that class everywhere") {
        const auto train = make_dataset({{0.0, 1.0}, {1.0, 0.5}, {-1.0, 2.0}}, {1, 1, 1},
                                        {"x", "y", "z"});
        const auto model = train_logistic_ovr(train, train);
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const std::vector<double> probe = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            CHECK(model.predict(probe.data(), 2) == 1);
        }
    }
    SUBCASE("analytic gradient matches central finite differences") {
        Rng rng(17);
        Matrix features(20, 5);
        for (double& v : features.data)
            v = rng.uniform(-1.0, 1.0);
        std::vector<int> targets(20);
        for (int& t : targets)
            t = static_cast<int>(rng.bounded(2));
        std::vector<double> w(5);
        for (double& v : w)
            v = rng.uniform(-0.5, 0.5);
        double bias = 0.2;
        const double lambda = 1e-3;

        double grad_bias = 0.0;
        const auto grad = binary_logistic_gradient(features, targets, w, bias, lambda, grad_bias);

        const double h = 1e-6;
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto wp = w, wm = w;
            wp[i] += h;
            wm[i] -= h;
            const double fd = (binary_logistic_loss(features, targets, wp, bias, lambda) -
                               binary_logistic_loss(features, targets, wm, bias, lambda)) /
                              (2.0 * h);
            CHECK(std::abs(grad[i] - fd) / std::max(1e-8, std::abs(fd)) < 1e-4);
        }
        const double fd_bias = (binary_logistic_loss(features, targets, w, bias + h, lambda) -
                                binary_logistic_loss(features, targets, w, bias - h, lambda)) /
                               (2.0 * h);
        CHECK(std::abs(grad_bias - fd_bias) / std::max(1e-8, std::abs(fd_bias)) < 1e-4);
    }
    SUBCASE("probabilities are a valid distribution") {
        const auto train = separable_blobs(50, 77);
        const auto model = train_logistic_ovr(train, train);
        Rng rng(5);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::vector<double> probe = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
            check_distribution(model.predict_proba(probe.data(), 2));
        }
    }
}

TEST_CASE("every model type emits valid distributions over a 1000-input sweep") {
    const auto train = single_informative_feature(90, 3, 0, 12);
    const auto val = single_informative_feature(24, 3, 0, 13);

    RandomForestHp rf_hp;
    rf_hp.n_trees = 15;
    rf_hp.seed = 1;
    GbtHp gbt_hp;
    gbt_hp.rounds = 10;
    MlpHp mlp_hp;
    mlp_hp.hidden = {8, 4};
    mlp_hp.epochs = 2;

    const std::vector<AnyModel> models = {
        train_logistic_ovr(train, val),
        train_random_forest(train, rf_hp),
        train_gbt(train, val, gbt_hp),
        train_mlp(train, val, mlp_hp),
    };
    Rng rng(99);
    for (const AnyModel& model : models) {
        for (int trial = 0; trial < 1000; ++trial) {
            const std::vector<double> probe = {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0),
                                               rng.uniform(-4.0, 4.0)};
            check_distribution(predict_proba(model, probe.data(), 3));
        }
    }
}

TEST_CASE("random forest") {
    SUBCASE("single-class data gives probability 1") {
        const auto train =
            make_dataset({{0.0}, {0.5}, {1.0}, {0.2}}, {0, 0, 0, 0}, {"only", "other"});
        RandomForestHp hp;
        hp.n_trees = 20;
        const auto model = train_random_forest(train, hp);
        const double probe = 0.3;
        const auto p = model.predict_proba(&probe, 1);
        CHECK(p[0] == doctest::Approx(1.0));
    }
    SUBCASE("xor pattern reaches >= 0.95 train accuracy") {
        const auto train = xor_dataset(200, 404);
        RandomForestHp hp;
        hp.n_trees = 50;
        hp.seed = 1;
        const auto model = train_random_forest(train, hp);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < train.size(); ++i)
            if (model.predict(train.features.row(i), 2) == train.labels[i])
                ++correct;
        CHECK(static_cast<double>(correct) / static_cast<double>(train.size()) >= 0.95);
    }
    SUBCASE("same master seed reproduces the forest") {
        const auto train = xor_dataset(80, 11);
        RandomForestHp hp;
        hp.n_trees = 10;
        hp.seed = 99;
        const auto a = train_random_forest(train, hp);
        const auto b = train_random_forest(train, hp);
        REQUIRE(a.trees.size() == b.trees.size());
        for (std::size_t t = 0; t < a.trees.size(); ++t) {
            REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
            for (std::size_t n = 0; n < a.trees[t].nodes.size(); ++n) {
                CHECK(a.trees[t].nodes[n].feature == b.trees[t].nodes[n].feature);
                CHECK(a.trees[t].nodes[n].threshold == b.trees[t].nodes[n].threshold);
                CHECK(a.trees[t].nodes[n].value == b.trees[t].nodes[n].value);
            }
        }
    }
    SUBCASE("every example reaches exactly one leaf") {
        const auto train = xor_dataset(50, 21);
        RandomForestHp hp;
        hp.n_trees = 5;
        hp.seed = 3;
        const auto model = train_random_forest(train, hp);
        for (const auto& tree : model.trees)
            for (std::size_t i = 0; i < train.size(); ++i) {
                // walks to a leaf and terminates
                const double cls = tree.predict(train.features.row(i));
                CHECK((cls == 0.0 || cls == 1.0));
            }
    }
}

TEST_CASE("gradient boosted trees") {
    SUBCASE("single-class probability approaches 1") {
        const auto train =
            make_dataset({{0.1}, {0.4}, {0.9}}, {2, 2, 2}, {"p", "q", "r"});
        GbtHp hp;
        hp.rounds = 30;
        const auto model = train_gbt(train, train, hp);
        const double probe = 0.5;
        const auto p = model.predict_proba(&probe, 1);
        CHECK(p[2] > 0.95);
    }
    SUBCASE("only informative feature tops the split counts") {
        const auto train = single_informative_feature(300, 10, 5, 2025);
        GbtHp hp;
        hp.rounds = 20;
        const auto model = train_gbt(train, train, hp);
        const auto ranked = feature_importance(model);
        CHECK(ranked.front().first == 5);
        CHECK(ranked.front().second > 0);
    }
    SUBCASE("training loss is non-increasing") {
        const auto train = xor_dataset(150, 5150);
        const auto model = train_gbt(train, train, GbtHp{});
        for (std::size_t r = 1; r < model.train_loss_history.size(); ++r)
            CHECK(model.train_loss_history[r] <= model.train_loss_history[r - 1] + 1e-12);
    }
    SUBCASE("split counters equal a structural recount") {
        const auto train = single_informative_feature(200, 6, 2, 7);
        GbtHp hp;
        hp.rounds = 15;
        const auto model = train_gbt(train, train, hp);

        std::vector<std::size_t> recount(train.feature_dim(), 0);
        std::size_t internal = 0;
        for (const auto& round : model.rounds)
            for (const auto& tree : round)
                for (const auto& node : tree.nodes)
                    if (!node.is_leaf()) {
                        ++recount[static_cast<std::size_t>(node.feature)];
                        ++internal;
                    }
        CHECK(recount == model.split_counts);
        CHECK(internal == model.total_internal_nodes());

        std::size_t count_sum = 0;
        for (const auto& [feature, count] : feature_importance(model))
            count_sum += count;
        CHECK(count_sum == internal);
    }
    SUBCASE("zero rounds means all counts zero") {
        const auto train = xor_dataset(40, 1);
        GbtHp hp;
        hp.rounds = 0;
        const auto model = train_gbt(train, train, hp);
        for (const auto& [feature, count] : feature_importance(model))
            CHECK(count == 0);
    }
}

TEST_CASE("mlp") {
    SUBCASE("backprop matches central finite differences on a 10-sample batch") {
        Rng rng(13);
        const std::size_t dim = 6;
        MlpModel model = make_mlp(dim, {8, 5}, 3, 42);
        Matrix batch(10, dim);
        for (double& v : batch.data)
            v = rng.uniform(-1.0, 1.0);
        std::vector<int> labels(10);
        for (int& l : labels)
            l = static_cast<int>(rng.bounded(3));
        const double lambda = 0.001;

        const MlpGradients grads = mlp_gradient(model, batch, labels, lambda);
        const double h = 1e-6;
        // probe 20 coordinates spread over all layers
        for (int probe = 0; probe < 20; ++probe) {
            const std::size_t l = rng.bounded(model.layers.size());
            double* target;
            double analytic;
            if (rng.uniform() < 0.8) {
                const std::size_t idx = rng.bounded(model.layers[l].weights.data.size());
                target = &model.layers[l].weights.data[idx];
                analytic = grads.layers[l].weights.data[idx];
            } else {
                const std::size_t idx = rng.bounded(model.layers[l].biases.size());
                target = &model.layers[l].biases[idx];
                analytic = grads.layers[l].biases[idx];
            }
            const double saved = *target;
            *target = saved + h;
            const double up = mlp_loss(model, batch, labels, lambda);
            *target = saved - h;
            const double down = mlp_loss(model, batch, labels, lambda);
            *target = saved;
            const double fd = (up - down) / (2.0 * h);
            CHECK(std::abs(analytic - fd) / std::max(1e-8, std::abs(fd)) < 1e-4);
        }
    }
    SUBCASE("lambda 0 removes exactly the L2 term") {
        Rng rng(14);
        MlpModel model = make_mlp(4, {6}, 2, 7);
        Matrix batch(5, 4);
        for (double& v : batch.data)
            v = rng.uniform(-1.0, 1.0);
        const std::vector<int> labels = {0, 1, 0, 1, 1};
        const double lambda = 0.001;
        const double with_l2 = mlp_loss(model, batch, labels, lambda);
        const double without = mlp_loss(model, batch, labels, 0.0);
        CHECK(with_l2 - without ==
              doctest::Approx(0.5 * lambda * model.sum_squared_weights()).epsilon(1e-12));
    }
    SUBCASE("zero weights give the uniform distribution") {
        MlpModel model = make_mlp(5, {8, 4}, 7, 3);
        for (auto& layer : model.layers)
            std::fill(layer.weights.data.begin(), layer.weights.data.end(), 0.0);
        const std::vector<double> probe = {1.0, -0.5, 0.25, 2.0, 0.0};
        const auto p = model.predict_proba(probe.data(), 5);
        for (double v : p)
            CHECK(v == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    }
    SUBCASE("softmax of zero logits is uniform") {
        const auto p = softmax(std::vector<double>(7, 0.0));
        for (double v : p)
            CHECK(v == doctest::Approx(1.0 / 7.0));
    }
    SUBCASE("training is deterministic per seed and selects the min-val-loss epoch") {
        const auto train = separable_blobs(40, 3131);
        const auto val = separable_blobs(10, 777);
        MlpHp hp;
        hp.hidden = {16, 8};
        hp.epochs = 5;
        hp.seed = 2024;
        const auto a = train_mlp(train, val, hp);
        const auto b = train_mlp(train, val, hp);
        REQUIRE(a.history.size() == 5);
        CHECK(a.selected_epoch == b.selected_epoch);
        for (std::size_t e = 0; e < a.history.size(); ++e) {
            CHECK(a.history[e].val_loss == b.history[e].val_loss);
            CHECK(a.history[e].val_accuracy == b.history[e].val_accuracy);
        }
        for (std::size_t l = 0; l < a.layers.size(); ++l)
            CHECK(a.layers[l].weights.data == b.layers[l].weights.data);

        double min_val = 1e300;
        std::size_t min_epoch = 0;
        for (const auto& e : a.history)
            if (e.val_loss < min_val) {
                min_val = e.val_loss;
                min_epoch = e.epoch;
            }
        CHECK(a.selected_epoch == min_epoch);
    }
    SUBCASE("dropout rate 0 equals the plain forward pass; inference never drops") {
        const auto train = separable_blobs(30, 999);
        const auto val = separable_blobs(8, 888);
        MlpHp hp_zero;
        hp_zero.hidden = {8};
        hp_zero.epochs = 2;
        hp_zero.dropout_rate = 0.0;
        hp_zero.seed = 5;
        const auto model = train_mlp(train, val, hp_zero);
        // identical repeated inference (no train-time randomness leaks in)
        const std::vector<double> probe = {0.5, -0.5};
        const auto p1 = model.predict_proba(probe.data(), 2);
        const auto p2 = model.predict_proba(probe.data(), 2);
        CHECK(p1 == p2);
    }
    SUBCASE("probabilities are a valid distribution") {
        MlpModel model = make_mlp(3, {6, 4}, 7, 11);
        Rng rng(6);
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> probe = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                               rng.uniform(-2.0, 2.0)};
            check_distribution(model.predict_proba(probe.data(), 3));
        }
    }
    SUBCASE("dimension mismatch is an error") {
        MlpModel model = make_mlp(4, {5}, 2, 1);
        const std::vector<double> probe = {1.0, 2.0};
        CHECK_THROWS_AS(model.predict_proba(probe.data(), 2), param_error);
    }
}

TEST_CASE("model serialization") {
    const auto train = single_informative_feature(60, 4, 1, 606);
    const std::vector<double> probe = {0.2, 0.9, -0.3, 0.5};

    SUBCASE("gbt round-trips through json") {
        GbtHp hp;
        hp.rounds = 5;
        SavedModel saved;
        saved.model = train_gbt(train, train, hp);
        saved.model_type = "gbt";
        saved.input_kind = "features";
        saved.feature_layout_version = kFeatureLayoutVersion;
        saved.split_seed = 7;
        const auto path = temp_path("mgc_test_gbt.json");
        save_model(path, saved);
        const auto loaded = load_model(path);
        CHECK(loaded.split_seed == 7);
        CHECK(predict_proba(loaded.model, probe.data(), 4) ==
              predict_proba(saved.model, probe.data(), 4));
        std::remove(path.c_str());
    }
    SUBCASE("random forest and logistic round-trip") {
        RandomForestHp rf_hp;
        rf_hp.n_trees = 8;
        rf_hp.seed = 3;
        SavedModel forest;
        forest.model = train_random_forest(train, rf_hp);
        forest.model_type = "random_forest";
        forest.input_kind = "features";
        forest.feature_layout_version = kFeatureLayoutVersion;

        SavedModel logistic;
        logistic.model = train_logistic_ovr(train, train);
        logistic.model_type = "logistic";
        logistic.input_kind = "features";
        logistic.feature_layout_version = kFeatureLayoutVersion;

        for (auto* m : {&forest, &logistic}) {
            const auto path = temp_path("mgc_test_model.json");
            save_model(path, *m);
            const auto loaded = load_model(path);
            CHECK(predict_proba(loaded.model, probe.data(), 4) ==
                  predict_proba(m->model, probe.data(), 4));
            std::remove(path.c_str());
        }
    }
    SUBCASE("mlp round-trips with its training log") {
        MlpHp hp;
        hp.hidden = {6};
        hp.epochs = 2;
        const auto val = single_informative_feature(20, 4, 1, 17);
        SavedModel saved;
        saved.model = train_mlp(train, val, hp);
        saved.model_type = "mlp";
        saved.input_kind = "features";
        saved.feature_layout_version = kFeatureLayoutVersion;
        const auto path = temp_path("mgc_test_mlp.json");
        save_model(path, saved);
        const auto loaded = load_model(path);
        CHECK(predict_proba(loaded.model, probe.data(), 4) ==
              predict_proba(saved.model, probe.data(), 4));
        const auto& lm = std::get<MlpModel>(loaded.model);
        const auto& sm = std::get<MlpModel>(saved.model);
        CHECK(lm.selected_epoch == sm.selected_epoch);
        REQUIRE(lm.history.size() == sm.history.size());
        CHECK(lm.history.back().val_loss == sm.history.back().val_loss);
        std::remove(path.c_str());
    }
    SUBCASE("feature layout mismatch refuses to load") {
        SavedModel saved;
        saved.model = train_logistic_ovr(train, train);
        saved.model_type = "logistic";
        saved.input_kind = "features";
        saved.feature_layout_version = "different.v0";
        const auto path = temp_path("mgc_test_layout.json");
        save_model(path, saved);
        CHECK_THROWS_AS(load_model(path), format_error);
        std::remove(path.c_str());
    }
}
