#include "mgc/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "mgc/csv.hpp"
#include "mgc/error.hpp"
#include "mgc/evaluation.hpp"
#include "mgc/image_io.hpp"
#include "mgc/model_io.hpp"
#include "mgc/rng.hpp"
#include "mgc/synth.hpp"
#include "mgc/wav.hpp"

namespace mgc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string slugify(const std::string& name) {
    std::string out;
    for (char ch : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(ch))
                          ? static_cast<char>(std::tolower(static_cast<unsigned char>(ch)))
                          : '_');
    return out;
}

void write_run_meta(const std::string& path, const std::string& command,
                    const RunConfig& config, ordered_json extra) {
    ordered_json meta;
    meta["command"] = command;
    meta["feature_layout_version"] = kFeatureLayoutVersion;
    meta["config"] = ordered_json::parse(config.to_json_string());
    for (auto& [key, value] : extra.items())
        meta[key] = value;
    write_text_file(path, meta.dump(2) + "\n");
}

std::size_t worker_count(const RunConfig& config) {
    if (config.jobs > 0)
        return config.jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(i) for i in [0, n) on a small worker pool; results land in
/// index-addressed slots so output order never depends on scheduling. The
/// first exception thrown by any worker is rethrown after the pool joins.
void parallel_for(std::size_t n, std::size_t n_workers,
                  const std::function<void(std::size_t)>& fn) {
    if (n_workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

/// Per-clip recipe for one synthetic genre. Classes differ primarily in
/// spectral signature; the click classes additionally differ in tempo.
SynthSpec corpus_recipe(std::size_t class_idx, Rng& rng, double duration_s) {
    SynthSpec spec;
    spec.duration_s = duration_s;
    switch (class_idx) {
    case 0: // Pop: steady low-register tone
        spec.kind = SynthKind::Sine;
        spec.frequency_hz = rng.uniform(230.0, 320.0);
        spec.amplitude = rng.uniform(0.4, 0.7);
        break;
    case 1: // Rock: full-band noise
        spec.kind = SynthKind::Noise;
        spec.amplitude = rng.uniform(0.4, 0.7);
        break;
    case 2: // Hip Hop: sparse clicks near 90 BPM
        spec.kind = SynthKind::ClickTrain;
        spec.bpm = rng.uniform(85.0, 95.0);
        spec.click_amplitude = rng.uniform(0.7, 1.0);
        break;
    case 3: // Techno: fast clicks under a high tone
        spec.kind = SynthKind::Mixture;
        spec.bpm = rng.uniform(175.0, 190.0);
        spec.click_amplitude = rng.uniform(0.7, 1.0);
        spec.frequency_hz = rng.uniform(5800.0, 6400.0);
        spec.amplitude = rng.uniform(0.1, 0.2);
        break;
    case 4: // Rhythm Blues: low-passed noise
        spec.kind = SynthKind::Noise;
        spec.amplitude = rng.uniform(0.4, 0.7);
        spec.lowpass_hz = rng.uniform(500.0, 900.0);
        break;
    case 5: // Vocal: slow upward sweep
        spec.kind = SynthKind::Chirp;
        spec.frequency_hz = rng.uniform(140.0, 180.0);
        spec.frequency_end_hz = rng.uniform(1200.0, 2000.0);
        spec.amplitude = rng.uniform(0.4, 0.7);
        break;
    default: // Reggae: A4-register tone over slow clicks
        spec.kind = SynthKind::Mixture;
        spec.frequency_hz = rng.uniform(435.0, 445.0);
        spec.amplitude = rng.uniform(0.3, 0.5);
        spec.bpm = rng.uniform(70.0, 80.0);
        spec.click_amplitude = rng.uniform(0.6, 0.9);
        break;
    }
    spec.seed = rng.next_u64();
    return spec;
}

std::string spectrogram_layout_version(const RunConfig& config) {
    return "pixels-" + std::to_string(config.image_size) + ".v1";
}

Matrix spectrogram_image(const AudioClip& prepared, const RunConfig& config) {
    const StftParams params{config.n_fft, config.hop};
    const MelFilterbank fb = mel_filterbank(prepared.sample_rate, config.n_fft,
                                            config.n_mels_spec, 0.0,
                                            prepared.sample_rate / 2.0);
    const Spectrogram mel_db = power_to_db(mel_spectrogram(prepared, params, fb));
    // mel bands as image rows, time as columns
    return resize_bilinear(mel_db.values.transposed(), config.image_size, config.image_size);
}

Dataset pixel_dataset(const std::vector<ManifestEntry>& entries, const RunConfig& config) {
    Dataset ds;
    ds.class_names = genre_class_names();
    ds.features = Matrix(entries.size(), config.image_size * config.image_size);
    ds.labels.resize(entries.size());
    parallel_for(entries.size(), worker_count(config), [&](std::size_t i) {
        const std::vector<double> pixels =
            spectrogram_pixels(read_wav_file(entries[i].path), config);
        std::copy(pixels.begin(), pixels.end(), ds.features.row(i));
    });
    for (std::size_t i = 0; i < entries.size(); ++i)
        ds.labels[i] = class_index(ds.class_names, entries[i].label);
    ds.validate();
    return ds;
}

struct ModelScores {
    std::string name;
    std::string model_type;
    std::vector<std::vector<double>> scores; // test rows x classes
};

void write_scores_csv(const std::string& path, const std::vector<std::vector<double>>& scores,
                      const std::vector<int>& labels,
                      const std::vector<std::string>& class_names) {
    std::vector<std::string> fields = class_names;
    fields.push_back("label");
    std::string text = join_csv(fields) + "\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        fields.clear();
        for (double v : scores[i])
            fields.push_back(format_double(v));
        fields.push_back(class_names[static_cast<std::size_t>(labels[i])]);
        text += join_csv(fields) + "\n";
    }
    write_text_file(path, text);
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& class_names) {
    std::vector<std::string> fields;
    fields.push_back("class");
    fields.insert(fields.end(), class_names.begin(), class_names.end());
    std::string text = join_csv(fields) + "\n";
    for (std::size_t i = 0; i < cm.n_classes; ++i) {
        fields.clear();
        fields.push_back(class_names[i]);
        for (std::size_t j = 0; j < cm.n_classes; ++j)
            fields.push_back(std::to_string(cm.at(i, j)));
        text += join_csv(fields) + "\n";
    }
    write_text_file(path, text);
}

void write_roc_csvs(const std::string& dir, const RocResult& roc,
                    const std::vector<std::string>& class_names) {
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        if (!roc.evaluated[c])
            continue;
        std::string text = "fpr,tpr\n";
        for (const auto& [fpr, tpr] : roc.curves[c].points)
            text += format_double(fpr) + "," + format_double(tpr) + "\n";
        write_text_file(dir + "/roc_" + slugify(class_names[c]) + ".csv", text);
    }
}

ordered_json report_to_json(const std::string& name, const std::string& model_type,
                            const EvaluationReport& report,
                            const std::vector<std::string>& class_names) {
    ordered_json row;
    row["name"] = name;
    row["model_type"] = model_type;
    row["accuracy"] = report.accuracy;
    row["f_score"] = report.macro_f;
    row["auc"] = report.macro_auc;
    ordered_json per_class = ordered_json::array();
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        ordered_json entry;
        entry["class"] = class_names[c];
        entry["auc_evaluated"] = static_cast<bool>(report.roc.evaluated[c]);
        entry["auc"] = report.roc.per_class_auc[c];
        per_class.push_back(entry);
    }
    row["per_class"] = per_class;
    return row;
}

} // namespace

AudioClip prepare_clip(const AudioClip& raw, const RunConfig& config) {
    AudioClip clip = resample(raw, config.sample_rate);
    if (config.apply_pre_emphasis)
        clip = pre_emphasis(clip, config.pre_emphasis_alpha);
    return clip;
}

std::vector<double> spectrogram_pixels(const AudioClip& raw, const RunConfig& config) {
    const Matrix image = spectrogram_image(prepare_clip(raw, config), config);
    return image.data;
}

void cmd_synth(const SynthOptions& options, const RunConfig& config) {
    const auto& classes = genre_class_names();
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec)
        throw io_error("cannot create directory " + options.out_dir + ": " + ec.message());

    std::vector<ManifestEntry> entries;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (std::size_t i = 0; i < options.clips_per_class; ++i) {
            Rng rng(mix_seed(config.seed, c, i));
            const SynthSpec spec = corpus_recipe(c, rng, options.duration_s);
            const AudioClip clip = synthesize(spec, config.sample_rate);

            char index_buf[8];
            std::snprintf(index_buf, sizeof(index_buf), "%03zu", i);
            const std::string filename = slugify(classes[c]) + "_" + index_buf + ".wav";
            write_wav_file((fs::path(options.out_dir) / filename).string(), clip);
            entries.push_back({filename, classes[c]});
        }
    }
    write_manifest((fs::path(options.out_dir) / "manifest.csv").string(), entries);
    write_run_meta((fs::path(options.out_dir) / "run_meta.json").string(), "synth", config,
                   ordered_json{{"classes", classes},
                                {"clips_per_class", options.clips_per_class},
                                {"duration_s", options.duration_s},
                                {"total_clips", entries.size()}});
    std::cout << "synthesized " << entries.size() << " clips in " << options.out_dir << "\n";
}

std::size_t cmd_extract(const std::string& manifest_path, const std::string& out_csv,
                        const RunConfig& config) {
    const std::vector<ManifestEntry> entries = read_manifest(manifest_path);
    if (entries.empty())
        throw format_error("manifest has no rows: " + manifest_path);

    const FeatureConfig fc = config.feature_config();
    Matrix features(entries.size(), kFeatureDim);
    std::vector<std::optional<std::string>> errors(entries.size());

    parallel_for(entries.size(), worker_count(config), [&](std::size_t i) {
        try {
            class_index(genre_class_names(), entries[i].label);
            const AudioClip clip = prepare_clip(read_wav_file(entries[i].path), config);
            const FeatureVector fv = extract(clip, fc);
            std::copy(fv.values.begin(), fv.values.end(), features.row(i));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::size_t n_failed = 0;
    Matrix kept(0, kFeatureDim);
    std::vector<std::string> kept_labels;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (errors[i]) {
            std::cerr << "extract: row " << i << " (" << entries[i].path
                      << ") failed: " << *errors[i] << "\n";
            ++n_failed;
            continue;
        }
        kept.data.insert(kept.data.end(), features.row(i), features.row(i) + kFeatureDim);
        ++kept.rows;
        kept_labels.push_back(entries[i].label);
    }

    write_features_csv(out_csv, kept, kept_labels);
    write_run_meta(out_csv + ".meta.json", "extract", config,
                   ordered_json{{"manifest", manifest_path},
                                {"rows", kept.rows},
                                {"failed_rows", n_failed}});
    return n_failed;
}

void cmd_spectrogram(const std::string& wav_path, const std::string& out_pgm,
                     const std::string& out_csv, const RunConfig& config) {
    const Matrix image = spectrogram_image(prepare_clip(read_wav_file(wav_path), config), config);
    write_pgm(out_pgm, image);
    write_matrix_csv(out_csv, image);
    write_run_meta(out_pgm + ".meta.json", "spectrogram", config,
                   ordered_json{{"wav", wav_path},
                                {"rows", image.rows},
                                {"cols", image.cols}});
}

void cmd_train(const std::string& model_type, const std::string& features_csv,
               const std::string& manifest_path, const std::string& out_model,
               const RunConfig& config) {
    const bool wants_pixels = model_type == "mlp_spectrogram";
    Dataset ds;
    if (wants_pixels) {
        if (manifest_path.empty())
            throw param_error("mlp_spectrogram training needs --manifest");
        ds = pixel_dataset(read_manifest(manifest_path), config);
    } else {
        if (features_csv.empty())
            throw param_error("training '" + model_type + "' needs --features");
        ds = read_features_csv(features_csv);
    }

    const SplitIndices idx = split(ds.size(), config.seed, config.train_frac, config.val_frac);
    const Dataset train = ds.subset(idx.train);
    const Dataset val = ds.subset(idx.validation);
    std::cout << "split: train=" << idx.train.size() << " val=" << idx.validation.size()
              << " test=" << idx.test.size() << " (seed " << config.seed << ")\n";

    SavedModel saved;
    saved.split_seed = config.seed;
    saved.input_kind = wants_pixels ? "spectrogram" : "features";
    saved.feature_layout_version =
        wants_pixels ? spectrogram_layout_version(config) : kFeatureLayoutVersion;

    if (model_type == "logistic") {
        saved.model_type = "logistic";
        saved.model = train_logistic_ovr(train, val, config.logistic);
    } else if (model_type == "random_forest") {
        RandomForestHp hp = config.forest;
        hp.seed = config.seed;
        saved.model_type = "random_forest";
        saved.model = train_random_forest(train, hp);
    } else if (model_type == "gbt") {
        saved.model_type = "gbt";
        saved.model = train_gbt(train, val, config.gbt);
    } else if (model_type == "mlp_features" || model_type == "mlp_spectrogram") {
        MlpHp hp = config.mlp;
        hp.seed = config.seed;
        hp.standardize = !wants_pixels; // pixels are already in [0, 1]
        saved.model_type = "mlp";
        saved.model = train_mlp(train, val, hp);
    } else {
        throw param_error("unknown model type '" + model_type +
                          "' (expected logistic|random_forest|gbt|mlp_features|mlp_spectrogram)");
    }

    save_model(out_model, saved);

    // validation metrics for the training log
    std::vector<std::vector<double>> val_scores(val.size());
    for (std::size_t i = 0; i < val.size(); ++i)
        val_scores[i] = predict_proba(saved.model, val.features.row(i), val.feature_dim());
    const EvaluationReport report =
        evaluate_scores(val_scores, val.labels, val.class_names.size());
    std::cout << "validation: accuracy=" << format_double(report.accuracy)
              << " f_score=" << format_double(report.macro_f)
              << " auc=" << format_double(report.macro_auc) << "\n";

    write_run_meta(out_model + ".meta.json", "train", config,
                   ordered_json{{"model_type", model_type},
                                {"input_kind", saved.input_kind},
                                {"split",
                                 {{"train", idx.train.size()},
                                  {"validation", idx.validation.size()},
                                  {"test", idx.test.size()}}},
                                {"validation_metrics",
                                 {{"accuracy", report.accuracy},
                                  {"f_score", report.macro_f},
                                  {"auc", report.macro_auc}}}});
}

void cmd_evaluate(const std::vector<std::string>& model_paths, const std::string& features_csv,
                  const std::string& manifest_path, const std::string& out_dir,
                  const RunConfig& config) {
    if (model_paths.empty())
        throw param_error("evaluate needs at least one --model");

    std::vector<SavedModel> models;
    std::vector<std::string> names;
    for (const std::string& path : model_paths) {
        models.push_back(load_model(path));
        names.push_back(fs::path(path).stem().string());
    }
    for (std::size_t i = 1; i < models.size(); ++i) {
        if (models[i].split_seed != models[0].split_seed)
            throw format_error("models disagree on split seed (" + model_paths[0] + " used " +
                               std::to_string(models[0].split_seed) + ", " + model_paths[i] +
                               " used " + std::to_string(models[i].split_seed) +
                               "); refusing to evaluate on inconsistent test sets");
        if (model_class_names(models[i].model) != model_class_names(models[0].model))
            throw format_error("models disagree on class names; refusing to evaluate");
    }

    const bool need_features = std::any_of(models.begin(), models.end(), [](const auto& m) {
        return m.input_kind == "features";
    });
    const bool need_pixels = std::any_of(models.begin(), models.end(), [](const auto& m) {
        return m.input_kind == "spectrogram";
    });
    if (need_features && features_csv.empty())
        throw param_error("evaluation of feature models needs --features");
    if (need_pixels && manifest_path.empty())
        throw param_error("evaluation of spectrogram models needs --manifest");

    Dataset feature_ds;
    Dataset pixel_ds;
    std::size_t n = 0;
    std::vector<int> labels;
    if (need_features) {
        feature_ds = read_features_csv(features_csv);
        n = feature_ds.size();
        labels = feature_ds.labels;
    }
    if (need_pixels) {
        const auto entries = read_manifest(manifest_path);
        pixel_ds = pixel_dataset(entries, config);
        if (need_features && pixel_ds.size() != n)
            throw format_error("features csv and manifest disagree on row count");
        if (!need_features) {
            n = pixel_ds.size();
            labels = pixel_ds.labels;
        }
    }

    const std::vector<std::string> class_names = model_class_names(models[0].model);
    const SplitIndices idx =
        split(n, models[0].split_seed, config.train_frac, config.val_frac);
    std::vector<int> test_labels;
    for (std::size_t i : idx.test)
        test_labels.push_back(labels[i]);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw io_error("cannot create directory " + out_dir + ": " + ec.message());

    ordered_json metrics;
    metrics["split_seed"] = models[0].split_seed;
    metrics["n_total"] = n;
    metrics["n_test"] = idx.test.size();
    metrics["models"] = ordered_json::array();

    std::vector<ModelScores> all_scores;
    for (std::size_t m = 0; m < models.size(); ++m) {
        const Dataset& ds = models[m].input_kind == "spectrogram" ? pixel_ds : feature_ds;
        ModelScores ms;
        ms.name = names[m];
        ms.model_type = models[m].model_type;
        ms.scores.reserve(idx.test.size());
        for (std::size_t i : idx.test)
            ms.scores.push_back(
                predict_proba(models[m].model, ds.features.row(i), ds.feature_dim()));
        all_scores.push_back(std::move(ms));
    }
    if (models.size() >= 2) {
        ModelScores ens;
        ens.name = "ensemble";
        ens.model_type = "ensemble";
        for (std::size_t i = 0; i < idx.test.size(); ++i) {
            std::vector<std::vector<double>> members;
            for (const ModelScores& ms : all_scores)
                if (ms.model_type != "ensemble")
                    members.push_back(ms.scores[i]);
            ens.scores.push_back(ensemble(members));
        }
        all_scores.push_back(std::move(ens));
    }

    for (const ModelScores& ms : all_scores) {
        const std::string dir = (fs::path(out_dir) / ms.name).string();
        fs::create_directories(dir, ec);
        if (ec)
            throw io_error("cannot create directory " + dir + ": " + ec.message());
        const EvaluationReport report =
            evaluate_scores(ms.scores, test_labels, class_names.size());
        write_scores_csv(dir + "/scores.csv", ms.scores, test_labels, class_names);
        write_confusion_csv(dir + "/confusion.csv", report.confusion_matrix, class_names);
        write_roc_csvs(dir, report.roc, class_names);
        metrics["models"].push_back(
            report_to_json(ms.name, ms.model_type, report, class_names));
        std::cout << ms.name << ": accuracy=" << format_double(report.accuracy)
                  << " f_score=" << format_double(report.macro_f)
                  << " auc=" << format_double(report.macro_auc) << "\n";
    }

    write_text_file((fs::path(out_dir) / "metrics.json").string(), metrics.dump(2) + "\n");
    write_run_meta((fs::path(out_dir) / "run_meta.json").string(), "evaluate", config,
                   ordered_json{{"models", model_paths}});
}

void cmd_importance(const std::string& model_path, const std::string& out_csv,
                    std::size_t top_n) {
    const SavedModel saved = load_model(model_path);
    const GbtModel* gbt = std::get_if<GbtModel>(&saved.model);
    if (!gbt)
        throw param_error("importance requires a gbt model, got '" + saved.model_type + "'");

    const auto ranked = feature_importance(*gbt);
    std::string text = "rank,feature,split_count\n";
    const bool canonical = gbt->feature_dim == kFeatureDim;
    for (std::size_t r = 0; r < std::min(top_n, ranked.size()); ++r) {
        const std::string name = canonical ? feature_names()[ranked[r].first]
                                           : "feature_" + std::to_string(ranked[r].first);
        text += std::to_string(r + 1) + "," + name + "," + std::to_string(ranked[r].second) +
                "\n";
    }
    write_text_file(out_csv, text);
}

void cmd_ablate(const std::string& features_csv, const std::string& out_csv,
                const std::vector<std::size_t>& n_values, const RunConfig& config) {
    const Dataset ds = read_features_csv(features_csv);
    const SplitIndices idx = split(ds.size(), config.seed, config.train_frac, config.val_frac);
    const Dataset train = ds.subset(idx.train);
    const Dataset val = ds.subset(idx.validation);
    const Dataset test = ds.subset(idx.test);

    const GbtModel full = train_gbt(train, val, config.gbt);
    std::vector<std::size_t> ranking;
    for (const auto& [feature, count] : feature_importance(full))
        ranking.push_back(feature);

    const auto rows = ablate_top_n(train, val, test, ranking, n_values, config.gbt);
    std::string text = "n,auc,accuracy\n";
    for (const AblationRow& row : rows)
        text += std::to_string(row.n_features) + "," + format_double(row.auc) + "," +
                format_double(row.accuracy) + "\n";
    write_text_file(out_csv, text);
    write_run_meta(out_csv + ".meta.json", "ablate", config,
                   ordered_json{{"features", features_csv}});
}

void cmd_domains(const std::string& features_csv, const std::string& out_csv,
                 const RunConfig& config) {
    const Dataset ds = read_features_csv(features_csv);
    const SplitIndices idx = split(ds.size(), config.seed, config.train_frac, config.val_frac);
    const auto rows = domain_comparison(ds.subset(idx.train), ds.subset(idx.validation),
                                        ds.subset(idx.test), config.gbt);
    std::string text = "feature_set,auc,accuracy\n";
    for (const DomainRow& row : rows)
        text += row.feature_set + "," + format_double(row.auc) + "," +
                format_double(row.accuracy) + "\n";
    write_text_file(out_csv, text);
    write_run_meta(out_csv + ".meta.json", "domains", config,
                   ordered_json{{"features", features_csv}});
}

} // namespace mgc
