#include "mgc/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "mgc/csv.hpp"
#include "mgc/error.hpp"

namespace mgc {

const std::vector<std::string>& genre_class_names() {
    static const std::vector<std::string> names = {
        "Pop", "Rock", "Hip Hop", "Techno", "Rhythm Blues", "Vocal", "Reggae"};
    return names;
}

void Dataset::validate() const {
    if (features.rows == 0)
        throw param_error("dataset is empty");
    if (labels.size() != features.rows)
        throw param_error("dataset has " + std::to_string(features.rows) + " rows but " +
                          std::to_string(labels.size()) + " labels");
    for (int label : labels)
        if (label < 0 || static_cast<std::size_t>(label) >= class_names.size())
            throw param_error("dataset label " + std::to_string(label) + " out of range");
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.class_names = class_names;
    out.features = Matrix(indices.size(), features.cols);
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t src = indices[r];
        std::copy(features.row(src), features.row(src) + features.cols, out.features.row(r));
        out.labels.push_back(labels[src]);
    }
    return out;
}

Dataset Dataset::select_features(const std::vector<std::size_t>& columns) const {
    Dataset out;
    out.class_names = class_names;
    out.labels = labels;
    out.features = Matrix(features.rows, columns.size());
    for (std::size_t r = 0; r < features.rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c] >= features.cols)
                throw param_error("feature column " + std::to_string(columns[c]) +
                                  " out of range");
            out.features(r, c) = features(r, columns[c]);
        }
    return out;
}

int class_index(const std::vector<std::string>& class_names, const std::string& label) {
    const auto it = std::find(class_names.begin(), class_names.end(), label);
    if (it == class_names.end())
        throw format_error("unknown class label: '" + label + "'");
    return static_cast<int>(it - class_names.begin());
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != "path,label")
        throw format_error("manifest must start with header 'path,label': " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<ManifestEntry> entries;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 2)
            throw format_error("manifest row " + std::to_string(i) + " needs 2 fields: " + path);
        std::filesystem::path wav(fields[0]);
        if (wav.is_relative())
            wav = base / wav;
        entries.push_back({wav.string(), fields[1]});
    }
    return entries;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::string text = "path,label\n";
    for (const auto& e : entries)
        text += e.path + "," + e.label + "\n";
    write_text_file(path, text);
}

void write_features_csv(const std::string& path, const Matrix& features,
                        const std::vector<std::string>& row_labels) {
    if (features.cols != kFeatureDim)
        throw param_error("features.csv expects " + std::to_string(kFeatureDim) + " columns");
    if (features.rows != row_labels.size())
        throw param_error("features.csv row/label count mismatch");

    std::vector<std::string> fields = feature_names();
    fields.push_back("label");
    std::string text = join_csv(fields) + "\n";
    for (std::size_t r = 0; r < features.rows; ++r) {
        fields.clear();
        for (std::size_t c = 0; c < features.cols; ++c)
            fields.push_back(format_double(features(r, c)));
        fields.push_back(row_labels[r]);
        text += join_csv(fields) + "\n";
    }
    write_text_file(path, text);
}

Dataset read_features_csv(const std::string& path, const std::vector<std::string>& class_names) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty())
        throw format_error("empty features csv: " + path);
    std::vector<std::string> expected_header = feature_names();
    expected_header.push_back("label");
    if (split_csv_line(lines[0]) != expected_header)
        throw format_error("features csv header does not match canonical layout " +
                           kFeatureLayoutVersion + ": " + path);

    Dataset out;
    out.class_names = class_names;
    std::size_t n_rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (!lines[i].empty())
            ++n_rows;
    out.features = Matrix(n_rows, kFeatureDim);
    out.labels.reserve(n_rows);

    std::size_t r = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != kFeatureDim + 1)
            throw format_error("features csv row " + std::to_string(i) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(kFeatureDim + 1));
        for (std::size_t c = 0; c < kFeatureDim; ++c)
            out.features(r, c) = parse_double(fields[c]);
        out.labels.push_back(class_index(class_names, fields.back()));
        ++r;
    }
    out.validate();
    return out;
}

} // namespace mgc
