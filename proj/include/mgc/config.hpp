#pragma once

#include <cstdint>
#include <string>

#include "mgc/features.hpp"
#include "mgc/gbt.hpp"
#include "mgc/logistic.hpp"
#include "mgc/mlp.hpp"
#include "mgc/random_forest.hpp"

namespace mgc {

/// Pipeline parameters. The defaults are the published configuration; any
/// override is echoed into run metadata.
struct RunConfig {
    std::uint64_t seed = 0;
    int sample_rate = 22050;
    std::size_t n_fft = 2048;
    std::size_t hop = 512;
    std::size_t n_mels_spec = 96;
    std::size_t n_mfcc = 20;
    double pre_emphasis_alpha = 0.97;
    bool apply_pre_emphasis = true;
    double rolloff_threshold = 0.85;
    std::size_t image_size = 216;
    double train_frac = 0.90;
    double val_frac = 0.05;
    std::size_t jobs = 0; // 0 = available parallelism

    LogisticOvrHp logistic;
    RandomForestHp forest;
    GbtHp gbt;
    MlpHp mlp;

    FeatureConfig feature_config() const;

    /// Applies one `key=value` override; throws param_error on unknown keys.
    void set(const std::string& key, const std::string& value);

    /// Loads a key=value file ('#' comments and blank lines ignored).
    static RunConfig load(const std::string& path);

    /// Flat key/value echo used in run metadata, insertion-ordered.
    std::string to_json_string() const;
};

} // namespace mgc
