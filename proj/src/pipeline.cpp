#include "painstates/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "painstates/csv.hpp"
#include "painstates/manifest.hpp"
#include "painstates/robustness.hpp"
#include "painstates/synth.hpp"
#include "painstates/timecourse.hpp"
#include "painstates/validation.hpp"

namespace painstates {

namespace fs = std::filesystem;

void RunConfig::check() const {
    auto mode_ok = [](const std::string& m) { return m == "auto" || m == "on" || m == "off"; };
    if (!mode_ok(mobility)) throw ConfigError("mobility: must be auto/on/off");
    if (!mode_ok(voice)) throw ConfigError("voice: must be auto/on/off");
    normalization_from_string(normalization);
    if (min_days < 1) throw ConfigError("filter.min_days: must be >= 1");
    if (k < 0) throw ConfigError("cluster.k: must be >= 0");
    if (k != 0 && k < 1) throw ConfigError("cluster.k: must be >= 1");
    if (k == 0 && (k_min < 2 || k_max < k_min))
        throw ConfigError("cluster.k_range: need 2 <= k_min <= k_max");
    if (zone_thresholds.size() != 4) throw ConfigError("mobility.thresholds: need 4 values");
    if (!(consensus_fraction > 0.0 && consensus_fraction <= 1.0))
        throw ConfigError("cluster.consensus_fraction: must be in (0, 1]");
    if (modality != "questionnaires" && modality != "mobility" && modality != "voice" &&
        modality != "all")
        throw ConfigError("cluster.modality: questionnaires/mobility/voice/all");
    if (window_days < 0) throw ConfigError("validation.window_days: must be >= 0");
    if (n_permutations < 0) throw ConfigError("validation.n_permutations: must be >= 0");
    if (pre_days < 1 || post_days < 1) throw ConfigError("events windows: must be >= 1 day");
    if (!(voice_var_threshold > 0.0 && voice_var_threshold < 1.0))
        throw ConfigError("voice.var_threshold: must be in (0, 1)");
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["out_dir"] = c.out_dir;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["normalization"] = c.normalization;
    j["lambda"] = c.lambda;
    ordered_json modal;
    modal["mobility"] = c.mobility;
    modal["voice"] = c.voice;
    j["modalities"] = modal;
    ordered_json filt;
    filt["min_days"] = c.min_days;
    filt["require_watch"] = c.require_watch;
    filt["min_watch_days"] = c.min_watch_days;
    j["filter"] = filt;
    ordered_json mob;
    mob["window_minutes"] = c.window_minutes;
    mob["thresholds"] = c.zone_thresholds;
    mob["day_offset_minutes"] = c.day_offset_minutes;
    j["mobility_zones"] = mob;
    ordered_json vo;
    vo["var_threshold"] = c.voice_var_threshold;
    j["voice_pca"] = vo;
    ordered_json cl;
    cl["k"] = c.k;
    cl["k_min"] = c.k_min;
    cl["k_max"] = c.k_max;
    cl["restarts"] = c.restarts;
    cl["select_restarts"] = c.select_restarts;
    cl["consensus_resamples"] = c.consensus_resamples;
    cl["consensus_fraction"] = c.consensus_fraction;
    cl["silhouette_max_n"] = c.silhouette_max_n;
    cl["consensus_max_n"] = c.consensus_max_n;
    cl["robustness"] = c.robustness;
    cl["modality"] = c.modality;
    j["cluster"] = cl;
    ordered_json val;
    val["window_days"] = c.window_days;
    val["n_permutations"] = c.n_permutations;
    j["validation"] = val;
    ordered_json ev;
    ev["pre_days"] = c.pre_days;
    ev["post_days"] = c.post_days;
    j["events"] = ev;
    return j;
}

namespace {

template <typename T>
void take(const ordered_json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void reject_unknown(const ordered_json& obj, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!known.count(key)) throw ConfigError("unknown config field '" + where + key + "'");
}

}  // namespace

RunConfig config_from_json(const ordered_json& j, RunConfig c) {
    reject_unknown(j, {"out_dir", "seed", "threads", "normalization", "lambda", "modalities",
                       "filter", "mobility_zones", "voice_pca", "cluster", "validation",
                       "events"},
                   "");
    take(j, "out_dir", c.out_dir);
    take(j, "seed", c.seed);
    take(j, "threads", c.threads);
    take(j, "normalization", c.normalization);
    take(j, "lambda", c.lambda);
    if (j.contains("modalities")) {
        const auto& m = j.at("modalities");
        reject_unknown(m, {"mobility", "voice"}, "modalities.");
        take(m, "mobility", c.mobility);
        take(m, "voice", c.voice);
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        reject_unknown(f, {"min_days", "require_watch", "min_watch_days"}, "filter.");
        take(f, "min_days", c.min_days);
        take(f, "require_watch", c.require_watch);
        take(f, "min_watch_days", c.min_watch_days);
    }
    if (j.contains("mobility_zones")) {
        const auto& m = j.at("mobility_zones");
        reject_unknown(m, {"window_minutes", "thresholds", "day_offset_minutes"},
                       "mobility_zones.");
        take(m, "window_minutes", c.window_minutes);
        take(m, "thresholds", c.zone_thresholds);
        take(m, "day_offset_minutes", c.day_offset_minutes);
    }
    if (j.contains("voice_pca")) {
        const auto& v = j.at("voice_pca");
        reject_unknown(v, {"var_threshold"}, "voice_pca.");
        take(v, "var_threshold", c.voice_var_threshold);
    }
    if (j.contains("cluster")) {
        const auto& cl = j.at("cluster");
        reject_unknown(cl,
                       {"k", "k_min", "k_max", "restarts", "select_restarts",
                        "consensus_resamples", "consensus_fraction", "silhouette_max_n",
                        "consensus_max_n", "robustness", "modality"},
                       "cluster.");
        take(cl, "k", c.k);
        take(cl, "k_min", c.k_min);
        take(cl, "k_max", c.k_max);
        take(cl, "restarts", c.restarts);
        take(cl, "select_restarts", c.select_restarts);
        take(cl, "consensus_resamples", c.consensus_resamples);
        take(cl, "consensus_fraction", c.consensus_fraction);
        take(cl, "silhouette_max_n", c.silhouette_max_n);
        take(cl, "consensus_max_n", c.consensus_max_n);
        take(cl, "robustness", c.robustness);
        take(cl, "modality", c.modality);
    }
    if (j.contains("validation")) {
        const auto& v = j.at("validation");
        reject_unknown(v, {"window_days", "n_permutations"}, "validation.");
        take(v, "window_days", c.window_days);
        take(v, "n_permutations", c.n_permutations);
    }
    if (j.contains("events")) {
        const auto& e = j.at("events");
        reject_unknown(e, {"pre_days", "post_days"}, "events.");
        take(e, "pre_days", c.pre_days);
        take(e, "post_days", c.post_days);
    }
    c.check();
    return c;
}

std::string StagePaths::manifest(const std::string& stage) const {
    return (fs::path(manifest_dir) / (stage + ".manifest.json")).string();
}

StagePaths stage_paths(const std::string& out_dir) {
    StagePaths p;
    p.out_dir = out_dir;
    auto at = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    p.questions = at("questions.csv");
    p.records = at("records.csv");
    p.demographics = at("demographics.csv");
    p.actigraphy = at("actigraphy.csv");
    p.voice = at("voice.csv");
    p.events = at("events.csv");
    p.ground_truth = at("ground_truth.csv");
    p.assessments = at("assessments.csv");
    p.spec_echo = at("spec_echo.json");
    p.cohort = at("cohort.csv");
    p.cohort_meta = at("cohort_meta.json");
    p.features = at("features.csv");
    p.feature_meta = at("feature_meta.json");
    p.voice_components = at("voice_components.json");
    p.model = at("model.json");
    p.robustness = at("robustness.json");
    p.validation = at("validation.json");
    p.assignments = at("assignments.csv");
    p.dwell = at("dwell_contrasts.csv");
    p.svg_dir = at("svg");
    p.manifest_dir = at("manifests");
    return p;
}

namespace {

RunManifest make_manifest(const char* stage, const RunConfig& config, std::uint64_t seed) {
    RunManifest m;
    m.stage = stage;
    m.base_dir = config.out_dir;
    m.seed = seed;
    m.config = config_to_json(config);
    // Neither can affect results, and both would break byte-identity across
    // run locations / --threads values.
    m.config.erase("out_dir");
    m.config.erase("threads");
    return m;
}

void ensure_dirs(const StagePaths& paths) {
    std::error_code ec;
    fs::create_directories(paths.out_dir, ec);
    fs::create_directories(paths.manifest_dir, ec);
}

void require_file(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("missing file: " + path);
}

std::ifstream open_in(const std::string& path) {
    require_file(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path);
    return out;
}

bool mobility_active(const RunConfig& config, const StagePaths& paths) {
    if (config.mobility == "off") return false;
    if (config.mobility == "on") {
        require_file(paths.actigraphy);
        return true;
    }
    return fs::exists(paths.actigraphy);
}

bool voice_active(const RunConfig& config, const StagePaths& paths) {
    if (config.voice == "off") return false;
    if (config.voice == "on") {
        require_file(paths.voice);
        require_file(paths.demographics);
        return true;
    }
    return fs::exists(paths.voice) && fs::exists(paths.demographics);
}

QuestionRegistry load_registry(const StagePaths& paths) {
    auto in = open_in(paths.questions);
    return parse_question_registry(in);
}

// cohort.csv: one row per complete participant-day, questions in registry
// order.
void write_cohort(const std::string& path, const CohortTable& table) {
    auto out = open_out(path);
    std::vector<std::string> header = {"participant_id", "date"};
    for (const auto& q : table.registry.questions()) header.push_back(q.question_id);
    csv::write_row(out, header);
    for (const auto& rec : table.records) {
        std::vector<std::string> fields = {rec.participant_id, rec.date.to_string()};
        for (const auto& q : table.registry.questions())
            fields.push_back(fmt_double(rec.responses.at(q.question_id)));
        csv::write_row(out, fields);
    }
}

CohortTable read_cohort(const std::string& path, const QuestionRegistry& registry,
                        const std::string& meta_path) {
    auto in = open_in(path);
    std::vector<std::string> header = {"participant_id", "date"};
    for (const auto& q : registry.questions()) header.push_back(q.question_id);
    csv::Reader reader(in, header, "cohort.csv");
    CohortTable table;
    table.registry = registry;
    while (auto row = reader.next()) {
        if (row->fields.size() != header.size())
            throw ParseError("cohort.csv line " + std::to_string(row->line_number) +
                             ": wrong field count");
        DailyRecord rec;
        rec.participant_id = row->fields[0];
        rec.date = Date::parse(row->fields[1]);
        for (std::size_t q = 0; q < registry.questions().size(); ++q)
            rec.responses[registry.questions()[q].question_id] =
                csv::parse_number(row->fields[q + 2], "cohort.csv", row->line_number);
        table.participants.insert(rec.participant_id);
        table.records.push_back(std::move(rec));
    }
    if (fs::exists(meta_path)) {
        const ordered_json meta = load_json(meta_path);
        if (meta.contains("responses_per_day"))
            for (const auto& [pid, rate] : meta.at("responses_per_day").items())
                table.responses_per_day[pid] = rate.get<double>();
    }
    return table;
}

NormalizationParams normalization_from_meta(const ordered_json& meta) {
    NormalizationParams params;
    const auto& norm = meta.at("normalization");
    params.method = normalization_from_string(norm.at("method").get<std::string>());
    for (const auto& [qid, entry] : norm.at("per_question").items())
        params.per_question[qid] = {entry.at("offset").get<double>(),
                                    entry.at("scale").get<double>()};
    return params;
}

ordered_json normalization_to_meta(const NormalizationParams& params) {
    ordered_json norm;
    norm["method"] = to_string(params.method);
    ordered_json per_q;
    for (const auto& [qid, t] : params.per_question) {
        ordered_json entry;
        entry["offset"] = t.offset;
        entry["scale"] = t.scale;
        per_q[qid] = entry;
    }
    norm["per_question"] = per_q;
    return norm;
}

std::vector<std::string> modality_columns(const RunConfig& config, const FeatureTable& table) {
    std::vector<std::string> cols(kCompositeNames.begin(), kCompositeNames.end());
    const bool has_mob =
        std::find(table.feature_names.begin(), table.feature_names.end(),
                  "effective_mobility") != table.feature_names.end();
    std::vector<std::string> voice_cols;
    for (const auto& name : table.feature_names)
        if (name.rfind("voice_pc_", 0) == 0) voice_cols.push_back(name);

    if (config.modality == "mobility" || config.modality == "all") {
        if (config.modality == "mobility" && !has_mob)
            throw ConfigError("modality 'mobility' requested but features.csv has no "
                              "effective_mobility column");
        if (has_mob) cols.push_back("effective_mobility");
    }
    if (config.modality == "voice" || config.modality == "all") {
        if (config.modality == "voice" && voice_cols.empty())
            throw ConfigError("modality 'voice' requested but features.csv has no voice columns");
        cols.insert(cols.end(), voice_cols.begin(), voice_cols.end());
    }
    return cols;
}

std::map<std::string, Date> first_event_dates(const std::string& events_path) {
    std::map<std::string, Date> out;
    if (!fs::exists(events_path)) return out;
    auto in = open_in(events_path);
    for (const auto& e : parse_events(in)) {
        auto it = out.find(e.participant_id);
        if (it == out.end() || e.date < it->second) out[e.participant_id] = e.date;
    }
    return out;
}

}  // namespace

void run_synth(const RunConfig& config, const std::string& spec_path) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    require_file(spec_path);
    const CohortSpec spec = cohort_spec_from_json(load_json(spec_path));

    RunManifest manifest = make_manifest("synth", config, spec.seed);
    manifest.add_input(spec_path);

    SynthResult result = generate_cohort(spec, config.out_dir);
    generate_assessments(spec, result.truth, paths.assessments);
    save_json(paths.spec_echo, cohort_spec_to_json(spec));

    for (const auto& f : result.files) manifest.add_output(f);
    manifest.add_output(paths.assessments);
    manifest.add_output(paths.spec_echo);
    manifest.save(paths.manifest("synth"));
}

void run_ingest(const RunConfig& config) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    RunManifest manifest = make_manifest("ingest", config, config.seed);
    manifest.add_input(paths.questions);
    manifest.add_input(paths.records);

    const QuestionRegistry registry = load_registry(paths);
    auto records_in = open_in(paths.records);
    const auto raw = parse_daily_records(records_in, registry);
    const auto aggregated = aggregate_daily(raw);
    const auto rates = response_rates(raw);

    FilterOptions filter;
    filter.min_days = config.min_days;
    filter.min_watch_days = config.min_watch_days;
    std::map<std::string, int> watch_days;
    const bool mobility = mobility_active(config, paths);
    if (mobility && config.require_watch) {
        manifest.add_input(paths.actigraphy);
        auto acti_in = open_in(paths.actigraphy);
        watch_days = actigraphy_coverage(parse_actigraphy(acti_in));
        filter.require_watch = true;
    }
    const CohortTable table =
        filter_complete(aggregated, registry, filter, &watch_days, &rates);
    table.check_complete();
    if (table.records.empty())
        std::cerr << "warning: no participant-days survived the completeness rules\n";

    write_cohort(paths.cohort, table);
    ordered_json meta;
    meta["participants"] = std::vector<std::string>(table.participants.begin(),
                                                    table.participants.end());
    meta["days"] = table.records.size();
    meta["raw_days"] = aggregated.size();
    ordered_json rates_j;
    for (const auto& [pid, r] : table.responses_per_day) rates_j[pid] = r;
    meta["responses_per_day"] = rates_j;
    save_json(paths.cohort_meta, meta);

    manifest.add_output(paths.cohort);
    manifest.add_output(paths.cohort_meta);
    manifest.save(paths.manifest("ingest"));
}

void run_features(const RunConfig& config) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    RunManifest manifest = make_manifest("features", config, config.seed);
    manifest.add_input(paths.questions);
    manifest.add_input(paths.cohort);

    const QuestionRegistry registry = load_registry(paths);
    const CohortTable table = read_cohort(paths.cohort, registry, paths.cohort_meta);
    if (table.records.empty()) throw DataError("cohort.csv is empty; nothing to featurize");
    const NormalizationParams params =
        fit_normalization(table, normalization_from_string(config.normalization));

    AssembleOptions options;
    options.compose.lambda = config.lambda;

    std::vector<MobilityProfile> mobility;
    if (mobility_active(config, paths)) {
        manifest.add_input(paths.actigraphy);
        ZoneConfig zones;
        zones.window_minutes = config.window_minutes;
        std::copy_n(config.zone_thresholds.begin(), 4, zones.thresholds.begin());
        zones.day_offset_minutes = config.day_offset_minutes;
        auto in = open_in(paths.actigraphy);
        mobility = derive_zones(parse_actigraphy(in), zones);
        options.use_mobility = true;
    }

    VoiceScores voice;
    if (voice_active(config, paths)) {
        manifest.add_input(paths.voice);
        manifest.add_input(paths.demographics);
        auto vin = open_in(paths.voice);
        const VoiceTable vtable = parse_voice_table(vin);
        auto din = open_in(paths.demographics);
        const Demographics demo = parse_demographics(din);
        voice = reduce_voice_table(vtable, demo, config.voice_var_threshold);
        options.use_voice = true;

        ordered_json vj;
        vj["input_features"] = voice.components.input_features;
        vj["component_names"] = voice.component_names;
        vj["explained_variance_ratio"] = voice.components.explained_variance_ratio;
        ordered_json loadings = ordered_json::array();
        for (std::size_t i = 0; i < voice.components.loadings.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t c = 0; c < voice.components.loadings.cols(); ++c)
                row.push_back(voice.components.loadings(i, c));
            loadings.push_back(row);
        }
        vj["loadings"] = loadings;
        vj["column_means"] = voice.components.column_means;
        ordered_json coef = ordered_json::array();
        for (std::size_t i = 0; i < voice.components.residual_coefficients.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t c = 0; c < 3; ++c)
                row.push_back(voice.components.residual_coefficients(i, c));
            coef.push_back(row);
        }
        vj["residual_coefficients"] = coef;
        vj["residual_intercept_only"] = voice.components.residual_intercept_only;
        save_json(paths.voice_components, vj);
        manifest.add_output(paths.voice_components);
    }

    AssembleSummary summary;
    const FeatureTable features = assemble_features(
        table, params, options, options.use_mobility ? &mobility : nullptr,
        options.use_voice ? &voice : nullptr, JoinMode::outer, &summary);
    {
        auto out = open_out(paths.features);
        write_feature_table(out, features);
    }

    ordered_json meta;
    meta["normalization"] = normalization_to_meta(params);
    meta["lambda"] = config.lambda;
    meta["feature_names"] = features.feature_names;
    ordered_json mods;
    mods["mobility"] = options.use_mobility;
    mods["voice"] = options.use_voice;
    meta["modalities"] = mods;
    ordered_json sj;
    sj["questionnaire_days"] = summary.questionnaire_days;
    sj["mobility_days_matched"] = summary.mobility_days_matched;
    sj["voice_days_matched"] = summary.voice_days_matched;
    sj["rows"] = summary.rows;
    meta["join_summary"] = sj;
    save_json(paths.feature_meta, meta);

    manifest.add_output(paths.features);
    manifest.add_output(paths.feature_meta);
    manifest.save(paths.manifest("features"));
}

void run_cluster(const RunConfig& config) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    RunManifest manifest = make_manifest("cluster", config, config.seed);
    manifest.add_input(paths.features);
    manifest.add_input(paths.feature_meta);

    auto fin = open_in(paths.features);
    const FeatureTable all_features = read_feature_table(fin);
    const ordered_json meta = load_json(paths.feature_meta);

    const std::vector<std::string> cols = modality_columns(config, all_features);
    const FeatureTable selected = select_features(all_features, cols);
    if (selected.size() == 0) throw DataError("no complete rows for the selected modality");

    ClusterModel model;
    model.feature_names = cols;
    model.normalization = normalization_from_meta(meta);
    model.compose.lambda = meta.at("lambda").get<double>();
    model.seed = config.seed;

    KMeansOptions km_options;
    km_options.restarts = config.restarts;
    int chosen_k = config.k;
    if (chosen_k == 0) {
        SelectKOptions sel;
        sel.kmeans.restarts = config.select_restarts;
        sel.consensus.resamples = config.consensus_resamples;
        sel.consensus.fraction = config.consensus_fraction;
        sel.silhouette_max_n = std::size_t(config.silhouette_max_n);
        sel.consensus_max_n = std::size_t(config.consensus_max_n);
        const int k_max = std::min<int>(config.k_max, int(selected.size()) - 1);
        KSelectionReport report = select_k(selected.values, config.k_min, k_max, config.seed, sel);
        chosen_k = report.chosen_k;
        model.selection = std::move(report);
    }
    const KMeansResult fit = kmeans(selected.values, chosen_k, config.seed, km_options);
    model.k = chosen_k;
    model.centroids = fit.centroids;
    model.wcss = fit.wcss;
    save_model(model, paths.model);
    manifest.add_output(paths.model);

    if (config.robustness) {
        const auto events = first_event_dates(paths.events);
        std::map<std::string, double> rates;
        if (fs::exists(paths.cohort_meta)) {
            const ordered_json cmeta = load_json(paths.cohort_meta);
            if (cmeta.contains("responses_per_day"))
                for (const auto& [pid, r] : cmeta.at("responses_per_day").items())
                    rates[pid] = r.get<double>();
        }
        RobustnessConfig rc;
        rc.kmeans = km_options;
        const auto reports = robustness_splits(selected, model, rates, events, rc);
        save_json(paths.robustness, robustness_to_json(reports));
        manifest.add_output(paths.robustness);
    }
    manifest.save(paths.manifest("cluster"));
}

void run_validate(const RunConfig& config) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    RunManifest manifest = make_manifest("validate", config, config.seed);
    manifest.add_input(paths.model);
    manifest.add_input(paths.features);
    manifest.add_input(paths.assessments);

    ClusterModel model = load_model(paths.model);
    auto fin = open_in(paths.features);
    const FeatureTable features =
        select_features(read_feature_table(fin), model.feature_names);
    auto ain = open_in(paths.assessments);
    const auto assessments = parse_assessments(ain);

    std::vector<SamplePoint> samples;
    samples.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i)
        samples.push_back({features.participant_ids[i], features.dates[i],
                           centroid_distances(model, features.values.row(i))});
    std::size_t dropped = 0;
    const auto pairs = pair_assessments(samples, assessments, config.window_days, &dropped);

    ValidationOptions options;
    options.n_permutations = config.n_permutations;
    options.seed = config.seed;
    ValidationReport report = validate_states(model, pairs, options);
    save_validation(report, paths.validation);

    // The ranking becomes part of the model artifact.
    model.ranking = report.ordinal_labels;
    save_model(model, paths.model);

    manifest.add_output(paths.validation);
    manifest.add_output(paths.model);
    manifest.config["dropped_assessments"] = dropped;
    manifest.config["n_pairs"] = pairs.size();
    manifest.save(paths.manifest("validate"));
}

void run_assign(const RunConfig& config) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    RunManifest manifest = make_manifest("assign", config, config.seed);
    manifest.add_input(paths.model);
    manifest.add_input(paths.features);

    const ClusterModel model = load_model(paths.model);
    auto fin = open_in(paths.features);
    const FeatureTable features =
        select_features(read_feature_table(fin), model.feature_names);
    const auto timecourses = assign_states(model, features);
    {
        auto out = open_out(paths.assignments);
        write_assignments(out, timecourses, model);
    }
    manifest.add_output(paths.assignments);
    manifest.save(paths.manifest("assign"));
}

void run_report(const RunConfig& config) {
    const StagePaths paths = stage_paths(config.out_dir);
    ensure_dirs(paths);
    RunManifest manifest = make_manifest("report", config, config.seed);
    manifest.add_input(paths.model);
    manifest.add_input(paths.features);
    manifest.add_input(paths.assignments);

    const ClusterModel model = load_model(paths.model);
    auto fin = open_in(paths.features);
    const FeatureTable features =
        select_features(read_feature_table(fin), model.feature_names);
    auto asin = open_in(paths.assignments);
    const auto timecourses = read_assignments(asin, model);

    std::vector<EventRecord> events;
    if (fs::exists(paths.events)) {
        manifest.add_input(paths.events);
        auto ein = open_in(paths.events);
        events = parse_events(ein);
    }

    ExportOptions options;
    options.pre_days = config.pre_days;
    options.post_days = config.post_days;
    const ExportResult result =
        export_timecourse(timecourses, features, model, events, paths.svg_dir, options);

    if (!events.empty()) {
        auto out = open_out(paths.dwell);
        csv::write_row(out, {"participant_id", "event_date", "state_label", "pre_fraction",
                             "post_fraction", "delta", "pre_days", "post_days", "has_pre",
                             "has_post"});
        for (const auto& dc : result.contrasts) {
            for (int s = 0; s < model.k; ++s) {
                csv::write_row(out, {dc.participant_id, dc.event_date.to_string(),
                                     model.ranking[std::size_t(s)],
                                     fmt_double(dc.pre_fractions[std::size_t(s)]),
                                     fmt_double(dc.post_fractions[std::size_t(s)]),
                                     fmt_double(dc.delta[std::size_t(s)]),
                                     std::to_string(dc.pre_days), std::to_string(dc.post_days),
                                     dc.has_pre ? "1" : "0", dc.has_post ? "1" : "0"});
            }
        }
        manifest.add_output(paths.dwell);
    }
    for (const auto& svg : result.svg_paths) manifest.add_output(svg);
    manifest.save(paths.manifest("report"));
}

void run_pipeline(const RunConfig& config, const std::string& spec_path) {
    run_synth(config, spec_path);
    run_ingest(config);
    run_features(config);
    run_cluster(config);
    run_validate(config);
    run_assign(config);
    run_report(config);
}

}  // namespace painstates
