#pragma once

#include <string>
#include <vector>

#include "painstates/jsonio.hpp"

namespace painstates {

/// Effective configuration of a run; file-loadable, flag-overridable.
struct RunConfig {
    std::string out_dir = "out";
    std::uint64_t seed = 20220101;
    int threads = 0;  // 0 = library default

    // features
    std::string normalization = "scale_bounds_minmax";
    double lambda = 1.0;
    std::string mobility = "auto";  // auto | on | off
    std::string voice = "auto";
    int window_minutes = 10;
    std::vector<double> zone_thresholds = {1.0, 2.0, 3.0, 4.0};
    int day_offset_minutes = 0;
    double voice_var_threshold = 0.02;

    // ingest
    int min_days = 10;
    bool require_watch = true;  // applies only when the mobility stream is used
    int min_watch_days = 10;

    // cluster
    int k = 0;  // 0 = choose via select_k over [k_min, k_max]
    int k_min = 2;
    int k_max = 10;
    int restarts = 50;
    int select_restarts = 20;
    int consensus_resamples = 100;
    double consensus_fraction = 0.8;
    int silhouette_max_n = 4000;
    int consensus_max_n = 2000;
    bool robustness = false;
    std::string modality = "all";  // questionnaires | mobility | voice | all

    // validate
    int window_days = 7;
    int n_permutations = 10000;

    // report
    int pre_days = 30;
    int post_days = 30;

    void check() const;
};

ordered_json config_to_json(const RunConfig& config);
/// Applies the keys present in `j` on top of `base` (grouped schema; unknown
/// keys are config errors naming the key).
RunConfig config_from_json(const ordered_json& j, RunConfig base = {});

/// Fixed artifact locations under a run's out_dir.
struct StagePaths {
    std::string out_dir;
    std::string questions, records, demographics, actigraphy, voice, events, ground_truth,
        assessments, spec_echo;
    std::string cohort, cohort_meta;
    std::string features, feature_meta, voice_components;
    std::string model, robustness;
    std::string validation;
    std::string assignments;
    std::string dwell, svg_dir;
    std::string manifest_dir;

    std::string manifest(const std::string& stage) const;
};
StagePaths stage_paths(const std::string& out_dir);

void run_synth(const RunConfig& config, const std::string& spec_path);
void run_ingest(const RunConfig& config);
void run_features(const RunConfig& config);
void run_cluster(const RunConfig& config);
void run_validate(const RunConfig& config);
void run_assign(const RunConfig& config);
void run_report(const RunConfig& config);
void run_pipeline(const RunConfig& config, const std::string& spec_path);

}  // namespace painstates
