#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgc/features.hpp"
#include "mgc/matrix.hpp"

namespace mgc {

/// The seven genre classes, index order fixed across the whole pipeline.
const std::vector<std::string>& genre_class_names();

/// Labeled feature matrix. Row i of `features` pairs with labels[i];
/// labels index into class_names.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t size() const { return features.rows; }
    std::size_t feature_dim() const { return features.cols; }

    /// Throws param_error on shape mismatch, out-of-range labels or an
    /// empty set.
    void validate() const;

    Dataset subset(const std::vector<std::size_t>& indices) const;
    Dataset select_features(const std::vector<std::size_t>& columns) const;
};

/// manifest.csv row: a WAV path and its genre label.
struct ManifestEntry {
    std::string path;
    std::string label;
};

/// Reads `path,label` rows; relative WAV paths are resolved against the
/// manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

/// features.csv: header of the 93 canonical feature names plus `label`,
/// one clip per row, round-trip precision.
void write_features_csv(const std::string& path, const Matrix& features,
                        const std::vector<std::string>& row_labels);
Dataset read_features_csv(const std::string& path,
                          const std::vector<std::string>& class_names = genre_class_names());

int class_index(const std::vector<std::string>& class_names, const std::string& label);

} // namespace mgc
