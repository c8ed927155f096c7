#pragma once

#include <string>
#include <variant>

#include "mgc/gbt.hpp"
#include "mgc/logistic.hpp"
#include "mgc/mlp.hpp"
#include "mgc/random_forest.hpp"

namespace mgc {

using AnyModel = std::variant<LogisticOvrModel, RandomForestModel, GbtModel, MlpModel>;

/// Envelope stored around every trained model. `input_kind` distinguishes
/// feature-vector models from flattened-spectrogram models so evaluation can
/// pick the right input.
struct SavedModel {
    AnyModel model;
    std::string model_type;  // logistic | random_forest | gbt | mlp
    std::string input_kind;  // features | spectrogram
    std::string feature_layout_version;
    std::uint64_t split_seed = 0;
};

std::vector<double> predict_proba(const AnyModel& model, const double* x, std::size_t d);
int predict(const AnyModel& model, const double* x, std::size_t d);
const std::vector<std::string>& model_class_names(const AnyModel& model);

/// Versioned JSON document; byte-identical for identical models.
void save_model(const std::string& path, const SavedModel& saved);

/// Throws format_error on an unknown format version or, for feature models,
/// a feature_layout_version that does not match this build.
SavedModel load_model(const std::string& path);

} // namespace mgc
