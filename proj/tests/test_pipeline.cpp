#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "painstates/manifest.hpp"
#include "painstates/model.hpp"
#include "painstates/pipeline.hpp"
#include "painstates/synth.hpp"

using namespace painstates;
using testing::TempDir;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(const std::string& out_dir) {
    RunConfig config;
    config.out_dir = out_dir;
    config.seed = 4242;
    config.k = 3;
    config.n_permutations = 200;
    config.select_restarts = 8;
    config.restarts = 20;
    config.consensus_resamples = 30;
    return config;
}

std::string write_small_spec(const TempDir& dir) {
    CohortSpec spec = graded_cohort_spec(3, 14, 40);
    spec.seed = 99;
    spec.event_day = 20;
    Matrix post(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        post(i, 0) = 0.7;
        post(i, 1) = 0.2;
        post(i, 2) = 0.1;
    }
    spec.post_event_transition_matrix = post;
    const std::string path = dir.file("spec.json");
    save_json(path, cohort_spec_to_json(spec));
    return path;
}

}  // namespace

TEST_CASE("pipeline smoke: every stage runs and leaves its artifacts") {
    TempDir dir("pipe_smoke");
    const auto spec_path = write_small_spec(dir);
    auto config = small_config(dir.file("out"));
    run_pipeline(config, spec_path);

    const StagePaths paths = stage_paths(config.out_dir);
    for (const std::string& p :
         {paths.records, paths.cohort, paths.features, paths.model, paths.validation,
          paths.assignments, paths.dwell}) {
        INFO(p);
        CHECK(fs::exists(p));
    }
    // One SVG per surviving participant.
    std::size_t svgs = 0;
    for (const auto& entry : fs::directory_iterator(paths.svg_dir)) {
        CHECK(entry.path().string().ends_with("_timecourse.svg"));
        ++svgs;
    }
    CHECK(svgs > 0);

    const ClusterModel model = load_model(paths.model);
    CHECK(model.k == 3);
    CHECK(model.has_ranking());

    // Manifest input hashes match the files consumed.
    for (const char* stage : {"synth", "ingest", "features", "cluster", "validate", "assign",
                              "report"})
        CHECK_NOTHROW(verify_manifest_inputs(paths.manifest(stage), config.out_dir));

    // Tampering with an input trips the check.
    {
        std::ofstream out(paths.cohort, std::ios::app);
        out << "p-tamper,2021-01-01,0,0,0,0,0,0\n";
    }
    CHECK_THROWS_AS(verify_manifest_inputs(paths.manifest("features"), config.out_dir),
                    DataError);
}

TEST_CASE("pipeline: rerunning a stage with identical inputs is byte-identical") {
    TempDir dir("pipe_rerun");
    const auto spec_path = write_small_spec(dir);
    auto config = small_config(dir.file("out"));
    run_pipeline(config, spec_path);
    const StagePaths paths = stage_paths(config.out_dir);
    const std::string before = sha256_file(paths.model);
    const std::string validation_before = sha256_file(paths.validation);
    run_cluster(config);
    run_validate(config);
    CHECK(sha256_file(paths.model) == before);
    CHECK(sha256_file(paths.validation) == validation_before);
}

TEST_CASE("cluster --modality reproduces the dataset variants from one features table") {
    TempDir dir("pipe_modality");
    CohortSpec spec = default_cohort_spec();
    spec.n_participants = 10;
    spec.days_per_participant = 25;
    spec.event_day = 12;
    spec.seed = 7;
    const std::string spec_path = dir.file("spec.json");
    save_json(spec_path, cohort_spec_to_json(spec));

    auto config = small_config(dir.file("out"));
    config.k = 2;
    run_synth(config, spec_path);
    run_ingest(config);
    run_features(config);

    const StagePaths paths = stage_paths(config.out_dir);
    config.modality = "questionnaires";
    run_cluster(config);
    CHECK(load_model(paths.model).feature_names.size() == 6);

    config.modality = "mobility";
    run_cluster(config);
    CHECK(load_model(paths.model).feature_names ==
          std::vector<std::string>{"pain", "mood", "sleep", "alertness", "medication",
                                   "activity", "effective_mobility"});

    config.modality = "voice";
    run_cluster(config);
    auto names = load_model(paths.model).feature_names;
    CHECK(names.size() > 6);
    for (std::size_t i = 6; i < names.size(); ++i)
        CHECK(names[i].rfind("voice_pc_", 0) == 0);

    config.modality = "all";
    run_cluster(config);
    CHECK(load_model(paths.model).feature_names.size() >= names.size() + 1);
}

TEST_CASE("cluster over k-range 2..10 reports all nine candidate values") {
    TempDir dir("pipe_krange");
    const auto spec_path = write_small_spec(dir);
    auto config = small_config(dir.file("out"));
    config.k = 0;  // run selection
    config.k_min = 2;
    config.k_max = 10;
    config.select_restarts = 6;
    config.consensus_resamples = 20;
    run_synth(config, spec_path);
    run_ingest(config);
    run_features(config);
    run_cluster(config);
    const ClusterModel model = load_model(stage_paths(config.out_dir).model);
    REQUIRE(model.selection.has_value());
    CHECK(model.selection->k_range.size() == 9);
    CHECK(model.selection->k_range.front() == 2);
    CHECK(model.selection->k_range.back() == 10);
    CHECK(model.selection->wcss_curve.size() == 9);
    CHECK(model.k == model.selection->chosen_k);
}

TEST_CASE("config json round trip and unknown-key rejection") {
    RunConfig config;
    config.k_min = 3;
    config.k_max = 7;
    config.lambda = 0.5;
    const auto j = config_to_json(config);
    const RunConfig back = config_from_json(j);
    CHECK(back.k_min == 3);
    CHECK(back.k_max == 7);
    CHECK(back.lambda == 0.5);

    ordered_json bad;
    bad["no_such_key"] = 1;
    CHECK_THROWS_AS(config_from_json(bad), ConfigError);
    ordered_json bad2;
    bad2["cluster"] = ordered_json{{"bogus", true}};
    CHECK_THROWS_AS(config_from_json(bad2), ConfigError);
}

TEST_CASE("missing inputs are config errors naming the path") {
    TempDir dir("pipe_missing");
    RunConfig config = small_config(dir.file("out"));
    try {
        run_ingest(config);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("questions.csv") != std::string::npos);
    }
}

TEST_CASE("model json: canonical form is stable and ranking slots in") {
    TempDir dir("model_json");
    ClusterModel model;
    model.k = 2;
    model.feature_names = {"pain", "mood"};
    model.centroids = Matrix{{0.125, 0.8}, {1.0 / 3.0, 0.2}};
    model.normalization.method = NormalizationMethod::scale_bounds_minmax;
    model.normalization.per_question["pain_overall"] = {0.0, 10.0};
    model.seed = 31;
    model.wcss = 1.25;
    const std::string path = dir.file("model.json");
    save_model(model, path);
    const std::string first = sha256_file(path);
    ClusterModel back = load_model(path);
    CHECK(back.centroids == model.centroids);  // exact round trip
    save_model(back, path);
    CHECK(sha256_file(path) == first);  // canonical serialization

    back.ranking = {"B", "A"};
    save_model(back, path);
    const ClusterModel ranked = load_model(path);
    CHECK(ranked.ranking == std::vector<std::string>{"B", "A"});
    CHECK(ranked.state_of_label("A") == 1);
    CHECK(ranked.states_by_rank() == std::vector<std::size_t>{1, 0});
}
