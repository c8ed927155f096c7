#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgc/commands.hpp"
#include "mgc/error.hpp"

namespace {

struct CommonOptions {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> sample_rate;
    std::optional<std::size_t> n_fft;
    std::optional<std::size_t> hop;
    std::optional<std::size_t> n_mels;
    std::optional<std::size_t> n_mfcc;
    std::optional<double> pre_emphasis;
    std::optional<bool> no_pre_emphasis;
    std::optional<double> rolloff;
    std::optional<std::size_t> image_size;
    std::optional<std::size_t> jobs;
    std::optional<std::size_t> mlp_epochs;
    std::optional<std::size_t> gbt_rounds;
    std::optional<std::size_t> forest_trees;
    std::optional<std::size_t> logistic_iterations;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_file, "key=value config file");
    cmd->add_option("--seed", opts.seed, "master seed");
    cmd->add_option("--sample-rate", opts.sample_rate, "target sample rate (Hz)");
    cmd->add_option("--n-fft", opts.n_fft, "FFT/window size");
    cmd->add_option("--hop", opts.hop, "hop size in samples");
    cmd->add_option("--n-mels", opts.n_mels, "mel bins for spectrograms");
    cmd->add_option("--n-mfcc", opts.n_mfcc, "MFCC filter/coefficient count");
    cmd->add_option("--pre-emphasis", opts.pre_emphasis, "pre-emphasis alpha");
    cmd->add_flag("--no-pre-emphasis", opts.no_pre_emphasis, "skip the pre-emphasis filter");
    cmd->add_option("--rolloff", opts.rolloff, "spectral rolloff threshold");
    cmd->add_option("--image-size", opts.image_size, "spectrogram image side length");
    cmd->add_option("--jobs", opts.jobs, "worker count (default: available parallelism)");
    cmd->add_option("--mlp-epochs", opts.mlp_epochs, "MLP training epochs");
    cmd->add_option("--gbt-rounds", opts.gbt_rounds, "boosting rounds");
    cmd->add_option("--forest-trees", opts.forest_trees, "random forest size");
    cmd->add_option("--logistic-iterations", opts.logistic_iterations,
                    "logistic regression iterations");
}

mgc::RunConfig build_config(const CommonOptions& opts) {
    mgc::RunConfig config =
        opts.config_file.empty() ? mgc::RunConfig{} : mgc::RunConfig::load(opts.config_file);
    if (opts.seed)
        config.seed = *opts.seed;
    if (opts.sample_rate)
        config.sample_rate = *opts.sample_rate;
    if (opts.n_fft)
        config.n_fft = *opts.n_fft;
    if (opts.hop)
        config.hop = *opts.hop;
    if (opts.n_mels)
        config.n_mels_spec = *opts.n_mels;
    if (opts.n_mfcc)
        config.n_mfcc = *opts.n_mfcc;
    if (opts.pre_emphasis)
        config.pre_emphasis_alpha = *opts.pre_emphasis;
    if (opts.no_pre_emphasis && *opts.no_pre_emphasis)
        config.apply_pre_emphasis = false;
    if (opts.rolloff)
        config.rolloff_threshold = *opts.rolloff;
    if (opts.image_size)
        config.image_size = *opts.image_size;
    if (opts.jobs)
        config.jobs = *opts.jobs;
    if (opts.mlp_epochs)
        config.mlp.epochs = *opts.mlp_epochs;
    if (opts.gbt_rounds)
        config.gbt.rounds = *opts.gbt_rounds;
    if (opts.forest_trees)
        config.forest.n_trees = *opts.forest_trees;
    if (opts.logistic_iterations)
        config.logistic.iterations = *opts.logistic_iterations;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"music genre classification pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate the labeled synthetic corpus");
    CommonOptions synth_opts;
    mgc::SynthOptions synth_params;
    synth->add_option("--out", synth_params.out_dir, "output directory")->required();
    synth->add_option("--clips-per-class", synth_params.clips_per_class, "clips per genre");
    synth->add_option("--duration", synth_params.duration_s, "clip length in seconds");
    add_common_options(synth, synth_opts);

    // extract
    auto* extract = app.add_subcommand("extract", "extract features for a manifest");
    CommonOptions extract_opts;
    std::string extract_manifest, extract_out;
    extract->add_option("--manifest", extract_manifest, "manifest.csv path")->required();
    extract->add_option("--out", extract_out, "output features.csv")->required();
    add_common_options(extract, extract_opts);

    // spectrogram
    auto* spectrogram = app.add_subcommand("spectrogram", "export a mel spectrogram image");
    CommonOptions spec_opts;
    std::string spec_wav, spec_pgm, spec_csv;
    spectrogram->add_option("--wav", spec_wav, "input WAV")->required();
    spectrogram->add_option("--out-pgm", spec_pgm, "output PGM image")->required();
    spectrogram->add_option("--out-csv", spec_csv, "output CSV matrix")->required();
    add_common_options(spectrogram, spec_opts);

    // train
    auto* train = app.add_subcommand("train", "train one classifier");
    CommonOptions train_opts;
    std::string train_model_type, train_features, train_manifest, train_out;
    train->add_option("--model", train_model_type, "model type")
        ->required()
        ->check(CLI::IsMember(
            {"logistic", "random_forest", "gbt", "mlp_features", "mlp_spectrogram"}));
    train->add_option("--features", train_features, "features.csv input");
    train->add_option("--manifest", train_manifest, "manifest input (mlp_spectrogram)");
    train->add_option("--out", train_out, "output model json")->required();
    add_common_options(train, train_opts);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "evaluate models on the test split");
    CommonOptions eval_opts;
    std::vector<std::string> eval_models;
    std::string eval_features, eval_manifest, eval_out_dir;
    evaluate->add_option("--model", eval_models, "model json (repeatable)")->required();
    evaluate->add_option("--features", eval_features, "features.csv input");
    evaluate->add_option("--manifest", eval_manifest, "manifest input");
    evaluate->add_option("--out-dir", eval_out_dir, "output directory")->required();
    add_common_options(evaluate, eval_opts);

    // importance
    auto* importance = app.add_subcommand("importance", "split-count feature importance");
    std::string imp_model, imp_out;
    std::size_t imp_top = 20;
    importance->add_option("--model", imp_model, "gbt model json")->required();
    importance->add_option("--out", imp_out, "output csv")->required();
    importance->add_option("--top", imp_top, "rows to emit");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "top-N feature ablation study");
    CommonOptions ablate_opts;
    std::string ablate_features, ablate_out;
    std::vector<std::size_t> ablate_n{10, 20, 30, 93};
    ablate->add_option("--features", ablate_features, "features.csv input")->required();
    ablate->add_option("--out", ablate_out, "output csv")->required();
    ablate->add_option("--n", ablate_n, "top-N values");
    add_common_options(ablate, ablate_opts);

    // domains
    auto* domains = app.add_subcommand("domains", "time vs frequency domain comparison");
    CommonOptions domains_opts;
    std::string domains_features, domains_out;
    domains->add_option("--features", domains_features, "features.csv input")->required();
    domains->add_option("--out", domains_out, "output csv")->required();
    add_common_options(domains, domains_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            mgc::cmd_synth(synth_params, build_config(synth_opts));
        } else if (extract->parsed()) {
            const std::size_t failed =
                mgc::cmd_extract(extract_manifest, extract_out, build_config(extract_opts));
            if (failed > 0) {
                std::cerr << failed << " row(s) failed\n";
                return 1;
            }
        } else if (spectrogram->parsed()) {
            mgc::cmd_spectrogram(spec_wav, spec_pgm, spec_csv, build_config(spec_opts));
        } else if (train->parsed()) {
            mgc::cmd_train(train_model_type, train_features, train_manifest, train_out,
                           build_config(train_opts));
        } else if (evaluate->parsed()) {
            mgc::cmd_evaluate(eval_models, eval_features, eval_manifest, eval_out_dir,
                              build_config(eval_opts));
        } else if (importance->parsed()) {
            mgc::cmd_importance(imp_model, imp_out, imp_top);
        } else if (ablate->parsed()) {
            mgc::cmd_ablate(ablate_features, ablate_out, ablate_n, build_config(ablate_opts));
        } else if (domains->parsed()) {
            mgc::cmd_domains(domains_features, domains_out, build_config(domains_opts));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
