#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "painstates/pipeline.hpp"
#include "painstates/synth.hpp"

using namespace painstates;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

RunConfig load_base_config(const std::string& config_path) {
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("PAINSTATES_CONFIG")) path = env;
    }
    if (path.empty()) return {};
    return config_from_json(load_json(path));
}

// "a..b" -> (a, b)
void parse_k_range(const std::string& text, RunConfig& config) {
    const auto pos = text.find("..");
    if (pos == std::string::npos)
        throw ConfigError("k-range must look like 2..10, got '" + text + "'");
    try {
        config.k_min = std::stoi(text.substr(0, pos));
        config.k_max = std::stoi(text.substr(pos + 2));
    } catch (const std::exception&) {
        throw ConfigError("k-range must look like 2..10, got '" + text + "'");
    }
    config.k = 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"painstates: discover, validate and track latent patient states\n"
                 "from longitudinal questionnaire, actigraphy and voice-feature data"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string config_path;
    app.add_option("--config", config_path,
                   "run config JSON (default: $PAINSTATES_CONFIG if set)");

    struct Flags {
        std::string out_dir, spec, k_range, modality, normalization, mobility, voice;
        std::uint64_t seed = 0;
        int threads = -1, k = -1, min_days = -1, window_days = -1, n_perm = -1;
        int pre_days = -1, post_days = -1;
        double lambda = std::numeric_limits<double>::quiet_NaN();
        bool robustness = false;
        std::string write_default_spec;
    } flags;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", flags.out_dir, "artifact directory (default: out)");
        cmd->add_option("--seed", flags.seed, "master seed");
        cmd->add_option("--threads", flags.threads, "worker cap; does not change results");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort with ground truth");
    add_common(synth);
    synth->add_option("--spec", flags.spec, "cohort spec JSON");
    synth->add_option("--write-default-spec", flags.write_default_spec,
                      "write the built-in default cohort spec to PATH and exit");

    CLI::App* ingest = app.add_subcommand("ingest", "parse, aggregate and filter raw records");
    add_common(ingest);
    ingest->add_option("--min-days", flags.min_days, "minimum complete days per participant");

    CLI::App* features = app.add_subcommand(
        "features", "normalize, compose and join questionnaire/mobility/voice features");
    add_common(features);
    features->add_option("--normalization", flags.normalization,
                         "scale_bounds_minmax | zscore");
    features->add_option("--lambda", flags.lambda, "activity interference penalty weight");
    features->add_option("--mobility", flags.mobility, "mobility stream: auto | on | off");
    features->add_option("--voice", flags.voice, "voice stream: auto | on | off");

    CLI::App* cluster = app.add_subcommand("cluster", "select k and fit the state model");
    add_common(cluster);
    cluster->add_option("--k", flags.k, "fixed k (skips model selection)");
    cluster->add_option("--k-range", flags.k_range, "selection range, e.g. 2..10");
    cluster->add_option("--modality", flags.modality,
                        "questionnaires | mobility | voice | all");
    cluster->add_flag("--robustness", flags.robustness,
                      "refit on high-responder / temporal splits");

    CLI::App* validate = app.add_subcommand(
        "validate", "correlate centroid distances with assessments and rank states");
    add_common(validate);
    validate->add_option("--window-days", flags.window_days, "pairing window (days)");
    validate->add_option("--permutations", flags.n_perm, "permutation count per cell");

    CLI::App* assign = app.add_subcommand("assign", "label every day with its nearest state");
    add_common(assign);

    CLI::App* report = app.add_subcommand("report", "emit per-patient SVGs and dwell contrasts");
    add_common(report);
    report->add_option("--pre-days", flags.pre_days, "dwell window before the event");
    report->add_option("--post-days", flags.post_days, "dwell window after the event");

    CLI::App* pipeline = app.add_subcommand("pipeline", "run every stage in order");
    add_common(pipeline);
    pipeline->add_option("--spec", flags.spec, "cohort spec JSON")->required();
    pipeline->add_option("--k", flags.k, "fixed k (skips model selection)");
    pipeline->add_option("--k-range", flags.k_range, "selection range, e.g. 2..10");
    pipeline->add_option("--modality", flags.modality,
                         "questionnaires | mobility | voice | all");
    pipeline->add_option("--permutations", flags.n_perm, "permutation count per cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help() << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        RunConfig config = load_base_config(config_path);
        if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
        if (synth->count("--seed") || ingest->count("--seed") || features->count("--seed") ||
            cluster->count("--seed") || validate->count("--seed") || assign->count("--seed") ||
            report->count("--seed") || pipeline->count("--seed"))
            config.seed = flags.seed;
        if (flags.threads >= 0) config.threads = flags.threads;
        if (flags.min_days >= 0) config.min_days = flags.min_days;
        if (!flags.normalization.empty()) config.normalization = flags.normalization;
        if (!std::isnan(flags.lambda)) config.lambda = flags.lambda;
        if (!flags.mobility.empty()) config.mobility = flags.mobility;
        if (!flags.voice.empty()) config.voice = flags.voice;
        if (flags.k >= 0) config.k = flags.k;
        if (!flags.k_range.empty()) parse_k_range(flags.k_range, config);
        if (!flags.modality.empty()) config.modality = flags.modality;
        if (flags.robustness) config.robustness = true;
        if (flags.window_days >= 0) config.window_days = flags.window_days;
        if (flags.n_perm >= 0) config.n_permutations = flags.n_perm;
        if (flags.pre_days >= 0) config.pre_days = flags.pre_days;
        if (flags.post_days >= 0) config.post_days = flags.post_days;
        config.check();
        if (config.threads > 0) omp_set_num_threads(config.threads);

        if (synth->parsed()) {
            if (!flags.write_default_spec.empty()) {
                save_json(flags.write_default_spec, cohort_spec_to_json(default_cohort_spec()));
                std::cout << "wrote " << flags.write_default_spec << "\n";
                return 0;
            }
            if (flags.spec.empty())
                throw ConfigError("synth needs --spec (or --write-default-spec)");
            run_synth(config, flags.spec);
        } else if (ingest->parsed()) {
            run_ingest(config);
        } else if (features->parsed()) {
            run_features(config);
        } else if (cluster->parsed()) {
            run_cluster(config);
        } else if (validate->parsed()) {
            run_validate(config);
        } else if (assign->parsed()) {
            run_assign(config);
        } else if (report->parsed()) {
            run_report(config);
        } else if (pipeline->parsed()) {
            run_pipeline(config, flags.spec);
        }
        return 0;
    } catch (const InvariantError& e) {
        std::cerr << "internal invariant breached: " << e.what() << "\n";
        return kExitInternal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
