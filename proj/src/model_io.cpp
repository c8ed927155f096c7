#include "mgc/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "mgc/error.hpp"
#include "mgc/features.hpp"

namespace mgc {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m;
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.data = j.at("data").get<std::vector<double>>();
    if (m.data.size() != m.rows * m.cols)
        throw format_error("model json: matrix shape does not match data length");
    return m;
}

json standardizer_to_json(const Standardizer& s) {
    return json{{"means", s.means}, {"stds", s.stds}};
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    s.means = j.at("means").get<std::vector<double>>();
    s.stds = j.at("stds").get<std::vector<double>>();
    return s;
}

json tree_to_json(const DecisionTree& t) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes)
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    return nodes;
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree t;
    for (const json& n : j) {
        TreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<std::uint32_t>();
        node.right = n.at(3).get<std::uint32_t>();
        node.value = n.at(4).get<double>();
        t.nodes.push_back(node);
    }
    return t;
}

json payload_for(const LogisticOvrModel& m) {
    return json{{"hyperparameters",
                 {{"iterations", m.hp.iterations}, {"step", m.hp.step}, {"lambda", m.hp.lambda}}},
                {"standardizer", standardizer_to_json(m.standardizer)},
                {"weights", matrix_to_json(m.weights)},
                {"biases", m.biases}};
}

json payload_for(const RandomForestModel& m) {
    json trees = json::array();
    for (const DecisionTree& t : m.trees)
        trees.push_back(tree_to_json(t));
    return json{{"hyperparameters",
                 {{"n_trees", m.hp.n_trees},
                  {"max_depth", m.hp.max_depth},
                  {"min_samples_split", m.hp.min_samples_split},
                  {"seed", m.hp.seed}}},
                {"standardizer", nullptr}, // tree splits are scale-invariant
                {"feature_dim", m.feature_dim},
                {"trees", trees}};
}

json payload_for(const GbtModel& m) {
    json rounds = json::array();
    for (const auto& round : m.rounds) {
        json class_trees = json::array();
        for (const DecisionTree& t : round)
            class_trees.push_back(tree_to_json(t));
        rounds.push_back(class_trees);
    }
    return json{{"hyperparameters",
                 {{"rounds", m.hp.rounds},
                  {"max_depth", m.hp.max_depth},
                  {"learning_rate", m.hp.learning_rate},
                  {"min_samples_split", m.hp.min_samples_split}}},
                {"standardizer", nullptr}, // tree splits are scale-invariant
                {"feature_dim", m.feature_dim},
                {"split_counts", m.split_counts},
                {"train_loss_history", m.train_loss_history},
                {"rounds_trees", rounds}};
}

json payload_for(const MlpModel& m) {
    json layers = json::array();
    for (const MlpLayer& layer : m.layers)
        layers.push_back(json{{"weights", matrix_to_json(layer.weights)},
                              {"biases", layer.biases}});
    json history = json::array();
    for (const EpochStats& e : m.history)
        history.push_back(json{{"epoch", e.epoch},
                               {"train_loss", e.train_loss},
                               {"val_loss", e.val_loss},
                               {"val_accuracy", e.val_accuracy}});
    json payload{{"hyperparameters",
                  {{"hidden", m.hp.hidden},
                   {"dropout_rate", m.hp.dropout_rate},
                   {"lambda", m.hp.lambda},
                   {"learning_rate", m.hp.learning_rate},
                   {"beta1", m.hp.beta1},
                   {"beta2", m.hp.beta2},
                   {"epsilon", m.hp.epsilon},
                   {"epochs", m.hp.epochs},
                   {"batch_size", m.hp.batch_size},
                   {"seed", m.hp.seed},
                   {"standardize", m.hp.standardize}}},
                 {"selected_epoch", m.selected_epoch},
                 {"training_log", history},
                 {"layers", layers}};
    payload["standardizer"] =
        m.standardizer ? standardizer_to_json(*m.standardizer) : json(nullptr);
    return payload;
}

LogisticOvrModel logistic_from_json(const json& p, const std::vector<std::string>& classes) {
    LogisticOvrModel m;
    m.class_names = classes;
    m.hp.iterations = p.at("hyperparameters").at("iterations").get<std::size_t>();
    m.hp.step = p.at("hyperparameters").at("step").get<double>();
    m.hp.lambda = p.at("hyperparameters").at("lambda").get<double>();
    m.standardizer = standardizer_from_json(p.at("standardizer"));
    m.weights = matrix_from_json(p.at("weights"));
    m.biases = p.at("biases").get<std::vector<double>>();
    return m;
}

RandomForestModel forest_from_json(const json& p, const std::vector<std::string>& classes) {
    RandomForestModel m;
    m.class_names = classes;
    m.hp.n_trees = p.at("hyperparameters").at("n_trees").get<std::size_t>();
    m.hp.max_depth = p.at("hyperparameters").at("max_depth").get<std::size_t>();
    m.hp.min_samples_split = p.at("hyperparameters").at("min_samples_split").get<std::size_t>();
    m.hp.seed = p.at("hyperparameters").at("seed").get<std::uint64_t>();
    m.feature_dim = p.at("feature_dim").get<std::size_t>();
    for (const json& t : p.at("trees"))
        m.trees.push_back(tree_from_json(t));
    return m;
}

GbtModel gbt_from_json(const json& p, const std::vector<std::string>& classes) {
    GbtModel m;
    m.class_names = classes;
    m.hp.rounds = p.at("hyperparameters").at("rounds").get<std::size_t>();
    m.hp.max_depth = p.at("hyperparameters").at("max_depth").get<std::size_t>();
    m.hp.learning_rate = p.at("hyperparameters").at("learning_rate").get<double>();
    m.hp.min_samples_split = p.at("hyperparameters").at("min_samples_split").get<std::size_t>();
    m.feature_dim = p.at("feature_dim").get<std::size_t>();
    m.split_counts = p.at("split_counts").get<std::vector<std::size_t>>();
    m.train_loss_history = p.at("train_loss_history").get<std::vector<double>>();
    for (const json& round : p.at("rounds_trees")) {
        std::vector<DecisionTree> trees;
        for (const json& t : round)
            trees.push_back(tree_from_json(t));
        m.rounds.push_back(std::move(trees));
    }
    return m;
}

MlpModel mlp_from_json(const json& p, const std::vector<std::string>& classes) {
    MlpModel m;
    m.class_names = classes;
    const json& hp = p.at("hyperparameters");
    m.hp.hidden = hp.at("hidden").get<std::vector<std::size_t>>();
    m.hp.dropout_rate = hp.at("dropout_rate").get<double>();
    m.hp.lambda = hp.at("lambda").get<double>();
    m.hp.learning_rate = hp.at("learning_rate").get<double>();
    m.hp.beta1 = hp.at("beta1").get<double>();
    m.hp.beta2 = hp.at("beta2").get<double>();
    m.hp.epsilon = hp.at("epsilon").get<double>();
    m.hp.epochs = hp.at("epochs").get<std::size_t>();
    m.hp.batch_size = hp.at("batch_size").get<std::size_t>();
    m.hp.seed = hp.at("seed").get<std::uint64_t>();
    m.hp.standardize = hp.at("standardize").get<bool>();
    m.selected_epoch = p.at("selected_epoch").get<std::size_t>();
    for (const json& e : p.at("training_log")) {
        EpochStats stats;
        stats.epoch = e.at("epoch").get<std::size_t>();
        stats.train_loss = e.at("train_loss").get<double>();
        stats.val_loss = e.at("val_loss").get<double>();
        stats.val_accuracy = e.at("val_accuracy").get<double>();
        m.history.push_back(stats);
    }
    for (const json& layer : p.at("layers")) {
        MlpLayer l;
        l.weights = matrix_from_json(layer.at("weights"));
        l.biases = layer.at("biases").get<std::vector<double>>();
        m.layers.push_back(std::move(l));
    }
    if (!p.at("standardizer").is_null())
        m.standardizer = standardizer_from_json(p.at("standardizer"));
    return m;
}

} // namespace

std::vector<double> predict_proba(const AnyModel& model, const double* x, std::size_t d) {
    return std::visit([&](const auto& m) { return m.predict_proba(x, d); }, model);
}

int predict(const AnyModel& model, const double* x, std::size_t d) {
    return std::visit([&](const auto& m) { return m.predict(x, d); }, model);
}

const std::vector<std::string>& model_class_names(const AnyModel& model) {
    return std::visit([](const auto& m) -> const std::vector<std::string>& {
        return m.class_names;
    }, model);
}

void save_model(const std::string& path, const SavedModel& saved) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["model_type"] = saved.model_type;
    doc["input_kind"] = saved.input_kind;
    doc["feature_layout_version"] = saved.feature_layout_version;
    doc["split_seed"] = saved.split_seed;
    doc["class_names"] = model_class_names(saved.model);
    doc["payload"] = std::visit([](const auto& m) { return payload_for(m); }, saved.model);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error("cannot open model file for writing: " + path);
    out << doc.dump(2) << "\n";
    if (!out)
        throw io_error("failed writing model file: " + path);
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw format_error("model file is not valid json: " + path + " (" + e.what() + ")");
    }

    if (doc.at("format_version").get<int>() != kFormatVersion)
        throw format_error("unsupported model format version in " + path);

    SavedModel saved;
    saved.model_type = doc.at("model_type").get<std::string>();
    saved.input_kind = doc.at("input_kind").get<std::string>();
    saved.feature_layout_version = doc.at("feature_layout_version").get<std::string>();
    saved.split_seed = doc.at("split_seed").get<std::uint64_t>();
    const auto classes = doc.at("class_names").get<std::vector<std::string>>();

    if (saved.input_kind == "features" &&
        saved.feature_layout_version != kFeatureLayoutVersion)
        throw format_error("model " + path + " was trained against feature layout '" +
                           saved.feature_layout_version + "', this build uses '" +
                           kFeatureLayoutVersion + "'");

    const json& p = doc.at("payload");
    if (saved.model_type == "logistic")
        saved.model = logistic_from_json(p, classes);
    else if (saved.model_type == "random_forest")
        saved.model = forest_from_json(p, classes);
    else if (saved.model_type == "gbt")
        saved.model = gbt_from_json(p, classes);
    else if (saved.model_type == "mlp")
        saved.model = mlp_from_json(p, classes);
    else
        throw format_error("unknown model_type '" + saved.model_type + "' in " + path);
    return saved;
}

} // namespace mgc
