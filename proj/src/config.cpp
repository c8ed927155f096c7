#include "mgc/config.hpp"

#include <json.hpp>

#include "mgc/csv.hpp"
#include "mgc/error.hpp"

namespace mgc {

FeatureConfig RunConfig::feature_config() const {
    FeatureConfig fc;
    fc.frames = FrameParams{n_fft, hop};
    fc.n_mfcc = n_mfcc;
    fc.n_mels_tempo = n_mels_spec;
    fc.rolloff_threshold = rolloff_threshold;
    return fc;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "seed")
        seed = static_cast<std::uint64_t>(parse_long(value));
    else if (key == "sample_rate")
        sample_rate = static_cast<int>(parse_long(value));
    else if (key == "n_fft")
        n_fft = static_cast<std::size_t>(parse_long(value));
    else if (key == "hop")
        hop = static_cast<std::size_t>(parse_long(value));
    else if (key == "n_mels")
        n_mels_spec = static_cast<std::size_t>(parse_long(value));
    else if (key == "n_mfcc")
        n_mfcc = static_cast<std::size_t>(parse_long(value));
    else if (key == "pre_emphasis")
        pre_emphasis_alpha = parse_double(value);
    else if (key == "apply_pre_emphasis")
        apply_pre_emphasis = parse_long(value) != 0;
    else if (key == "rolloff_threshold")
        rolloff_threshold = parse_double(value);
    else if (key == "image_size")
        image_size = static_cast<std::size_t>(parse_long(value));
    else if (key == "train_frac")
        train_frac = parse_double(value);
    else if (key == "val_frac")
        val_frac = parse_double(value);
    else if (key == "jobs")
        jobs = static_cast<std::size_t>(parse_long(value));
    else if (key == "logistic_iterations")
        logistic.iterations = static_cast<std::size_t>(parse_long(value));
    else if (key == "logistic_step")
        logistic.step = parse_double(value);
    else if (key == "logistic_lambda")
        logistic.lambda = parse_double(value);
    else if (key == "forest_trees")
        forest.n_trees = static_cast<std::size_t>(parse_long(value));
    else if (key == "forest_max_depth")
        forest.max_depth = static_cast<std::size_t>(parse_long(value));
    else if (key == "gbt_rounds")
        gbt.rounds = static_cast<std::size_t>(parse_long(value));
    else if (key == "gbt_max_depth")
        gbt.max_depth = static_cast<std::size_t>(parse_long(value));
    else if (key == "gbt_learning_rate")
        gbt.learning_rate = parse_double(value);
    else if (key == "mlp_epochs")
        mlp.epochs = static_cast<std::size_t>(parse_long(value));
    else if (key == "mlp_batch_size")
        mlp.batch_size = static_cast<std::size_t>(parse_long(value));
    else if (key == "mlp_learning_rate")
        mlp.learning_rate = parse_double(value);
    else if (key == "mlp_dropout")
        mlp.dropout_rate = parse_double(value);
    else if (key == "mlp_lambda")
        mlp.lambda = parse_double(value);
    else
        throw param_error("unknown config key: '" + key + "'");
}

RunConfig RunConfig::load(const std::string& path) {
    RunConfig config;
    for (const std::string& line : read_lines(path)) {
        if (line.empty() || line[0] == '#')
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw format_error("config line is not key=value: '" + line + "'");
        config.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return config;
}

std::string RunConfig::to_json_string() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["sample_rate"] = sample_rate;
    j["n_fft"] = n_fft;
    j["hop"] = hop;
    j["n_mels"] = n_mels_spec;
    j["n_mfcc"] = n_mfcc;
    j["pre_emphasis"] = pre_emphasis_alpha;
    j["apply_pre_emphasis"] = apply_pre_emphasis;
    j["rolloff_threshold"] = rolloff_threshold;
    j["image_size"] = image_size;
    j["train_frac"] = train_frac;
    j["val_frac"] = val_frac;
    j["logistic"] = {{"iterations", logistic.iterations},
                     {"step", logistic.step},
                     {"lambda", logistic.lambda}};
    j["forest"] = {{"n_trees", forest.n_trees}, {"max_depth", forest.max_depth}};
    j["gbt"] = {{"rounds", gbt.rounds},
                {"max_depth", gbt.max_depth},
                {"learning_rate", gbt.learning_rate}};
    j["mlp"] = {{"epochs", mlp.epochs},
                {"batch_size", mlp.batch_size},
                {"learning_rate", mlp.learning_rate},
                {"dropout_rate", mlp.dropout_rate},
                {"lambda", mlp.lambda}};
    return j.dump(2);
}

} // namespace mgc
