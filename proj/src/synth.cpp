#include "painstates/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "painstates/csv.hpp"
#include "painstates/validation.hpp"

namespace painstates {

namespace {

struct QuestionDef {
    const char* id;
    const char* category;
    double lo, hi;
    const char* polarity;
};

// The questionnaire battery behind the six composites.
const QuestionDef kQuestions[] = {
    {"pain_overall", "pain", 0, 10, "higher_is_worse"},
    {"pain_leg", "pain", 0, 10, "higher_is_worse"},
    {"pain_back", "pain", 0, 10, "higher_is_worse"},
    {"mood", "mood", 0, 10, "higher_is_better"},
    {"sleep_hours", "sleep", 0, 12, "higher_is_better"},
    {"sleep_quality", "sleep", 0, 10, "higher_is_better"},
    {"alertness", "alertness", 0, 10, "higher_is_better"},
    {"med_opioid", "medication", 0, 10, "higher_is_worse"},
    {"med_otc", "medication", 0, 10, "higher_is_worse"},
    {"med_non_opioid", "medication", 0, 10, "higher_is_worse"},
    {"activity_adl", "activity_adl", 0, 20, "higher_is_better"},
    {"activity_interference", "activity_interference", 0, 10, "higher_is_worse"},
};

enum CompositeIndex { kPain = 0, kMood, kSleep, kAlertness, kMedication, kActivity };

struct InstrumentDef {
    Instrument instrument;
    double lo, hi;
    bool higher_is_worse;
};

const InstrumentDef kInstrumentDefs[] = {
    {Instrument::ODI, 10.0, 80.0, true},
    {Instrument::EQ5D_PAIN, 1.0, 5.0, true},
    {Instrument::EQ5D_ACTIVITIES, 1.0, 5.0, true},
    {Instrument::EQ5D_VAS_HEALTH, 0.0, 100.0, false},
};

const Date kStartDate(2021, 1, 1);

std::string participant_name(int index, int total) {
    int width = 1;
    for (int t = total - 1; t >= 10; t /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return "P" + std::string(std::size_t(std::max(0, width - int(digits.size()))), '0') + digits;
}

int draw_categorical(Rng& rng, std::span<const double> probs) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return int(i);
    }
    return int(probs.size()) - 1;
}

// Zone occupancy peaked around the state's mobility target.
std::array<double, 5> zone_profile(double effective_mobility) {
    std::array<double, 5> p{};
    const double center = 4.0 * effective_mobility;
    double total = 0.0;
    for (int z = 0; z < 5; ++z) {
        p[std::size_t(z)] = std::exp(-0.5 * (z - center) * (z - center) / (0.7 * 0.7));
        total += p[std::size_t(z)];
    }
    for (auto& v : p) v /= total;
    return p;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
}

}  // namespace

void CohortSpec::check() const {
    if (n_participants < 1 || days_per_participant < 1 || n_states < 1)
        throw ConfigError("cohort spec: counts must be positive");
    if (state_feature_means.rows() != std::size_t(n_states) || state_feature_means.cols() != 6)
        throw ConfigError("cohort spec: state_feature_means must be n_states x 6");
    if (noise_sd < 0) throw ConfigError("cohort spec: noise_sd must be >= 0");
    if (missingness_rate < 0 || missingness_rate >= 1)
        throw ConfigError("cohort spec: missingness_rate must be in [0, 1)");
    if (transition_matrix.rows() != std::size_t(n_states) ||
        transition_matrix.cols() != std::size_t(n_states))
        throw ConfigError("cohort spec: transition matrix must be n_states x n_states");
    auto check_stochastic = [&](const Matrix& m, const char* name) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (m(i, j) < 0) throw ConfigError(std::string(name) + ": negative probability");
                sum += m(i, j);
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw ConfigError(std::string(name) + ": row " + std::to_string(i) +
                                  " does not sum to 1");
        }
    };
    check_stochastic(transition_matrix, "transition_matrix");
    if (post_event_transition_matrix) {
        if (post_event_transition_matrix->rows() != std::size_t(n_states) ||
            post_event_transition_matrix->cols() != std::size_t(n_states))
            throw ConfigError("cohort spec: post-event matrix must be n_states x n_states");
        check_stochastic(*post_event_transition_matrix, "post_event_transition_matrix");
        if (!event_day) throw ConfigError("cohort spec: post-event matrix without event_day");
    }
    if (event_day && (*event_day < 1 || *event_day >= days_per_participant))
        throw ConfigError("cohort spec: event_day outside the study window");
    if (!state_mobility.empty() && state_mobility.size() != std::size_t(n_states))
        throw ConfigError("cohort spec: state_mobility length must equal n_states");
    for (double em : state_mobility)
        if (em < 0 || em > 1) throw ConfigError("cohort spec: mobility targets must be in [0,1]");
    if (!state_voice_codes.empty() && state_voice_codes.rows() != std::size_t(n_states))
        throw ConfigError("cohort spec: voice codes must have one row per state");
    if (with_voice() && voice_raw_features < int(state_voice_codes.cols()))
        throw ConfigError("cohort spec: fewer raw voice features than code dimensions");
    // A mean more than 3 SD outside the normalized bounds would clip nearly
    // every draw; treat it as an authoring mistake.
    for (std::size_t s = 0; s < state_feature_means.rows(); ++s)
        for (std::size_t c = 0; c < 6; ++c) {
            const double m = state_feature_means(s, c);
            const double lo = c == kActivity ? -1.0 : 0.0;
            if (m < lo - 3 * noise_sd || m > 1.0 + 3 * noise_sd)
                throw ConfigError("cohort spec: state mean far outside scale bounds");
        }
    if (assessment_schedule_days < 1) throw ConfigError("cohort spec: schedule must be >= 1 day");
}

CohortSpec default_cohort_spec() {
    CohortSpec spec;
    spec.n_participants = 120;
    spec.days_per_participant = 100;
    spec.n_states = 5;
    // Three groups: {S0,S1} mild, {S2,S3} moderate, {S4} severe. Within the
    // first two groups only pain (and the voice code) separates the twins.
    spec.state_feature_means = Matrix{
        {0.12, 0.80, 0.80, 0.80, 0.15, 0.45},
        {0.32, 0.80, 0.80, 0.80, 0.15, 0.45},
        {0.52, 0.45, 0.45, 0.45, 0.50, 0.10},
        {0.72, 0.45, 0.45, 0.45, 0.50, 0.10},
        {0.90, 0.15, 0.15, 0.15, 0.85, -0.20},
    };
    spec.state_mobility = {0.78, 0.78, 0.48, 0.48, 0.18};
    spec.state_voice_codes = Matrix(5, 2);
    for (int s = 0; s < 5; ++s) {
        const double theta = 2.0 * M_PI * double(s) / 5.0 + 0.3;
        spec.state_voice_codes(std::size_t(s), 0) = 1.2 * std::cos(theta);
        spec.state_voice_codes(std::size_t(s), 1) = 1.2 * std::sin(theta);
    }
    spec.noise_sd = 0.5;
    spec.transition_matrix = Matrix(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            spec.transition_matrix(i, j) = i == j ? 0.6 : 0.1;
    // Mid-study therapy event after which occupancy drifts toward the
    // better states.
    spec.event_day = 50;
    Matrix post(5, 5);
    const double improved[5] = {0.30, 0.28, 0.18, 0.14, 0.10};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) post(i, j) = improved[j];
    spec.post_event_transition_matrix = post;
    return spec;
}

CohortSpec graded_cohort_spec(int n_states, int n_participants, int days) {
    if (n_states < 1) throw ConfigError("graded spec needs n_states >= 1");
    CohortSpec spec;
    spec.n_participants = n_participants;
    spec.days_per_participant = days;
    spec.n_states = n_states;
    spec.state_feature_means = Matrix(std::size_t(n_states), 6);
    spec.state_mobility.resize(std::size_t(n_states));
    for (int s = 0; s < n_states; ++s) {
        const double q = n_states == 1 ? 1.0 : 1.0 - double(s) / double(n_states - 1);
        spec.state_feature_means(std::size_t(s), kPain) = 0.85 - 0.7 * q;
        spec.state_feature_means(std::size_t(s), kMood) = 0.15 + 0.7 * q;
        spec.state_feature_means(std::size_t(s), kSleep) = 0.15 + 0.7 * q;
        spec.state_feature_means(std::size_t(s), kAlertness) = 0.15 + 0.7 * q;
        spec.state_feature_means(std::size_t(s), kMedication) = 0.85 - 0.7 * q;
        spec.state_feature_means(std::size_t(s), kActivity) = 0.55 * q - 0.1;
        spec.state_mobility[std::size_t(s)] = 0.15 + 0.7 * q;
    }
    // Low enough that adjacent graded states stay cleanly separable even at
    // five states; recovery robustness at realistic noise is the default
    // spec's job, not this oracle's.
    spec.noise_sd = 0.15;
    spec.assessment_schedule_days = 10;
    spec.assessment_noise_sd = 0.03;
    spec.transition_matrix = Matrix(std::size_t(n_states), std::size_t(n_states));
    for (std::size_t i = 0; i < std::size_t(n_states); ++i)
        for (std::size_t j = 0; j < std::size_t(n_states); ++j)
            spec.transition_matrix(i, j) =
                n_states == 1 ? 1.0 : (i == j ? 0.7 : 0.3 / double(n_states - 1));
    return spec;
}

ordered_json cohort_spec_to_json(const CohortSpec& spec) {
    ordered_json j;
    j["n_participants"] = spec.n_participants;
    j["days_per_participant"] = spec.days_per_participant;
    j["n_states"] = spec.n_states;
    auto matrix_rows = [](const Matrix& m) {
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
            rows.push_back(row);
        }
        return rows;
    };
    j["state_feature_means"] = matrix_rows(spec.state_feature_means);
    j["state_mobility"] = spec.state_mobility;
    j["state_voice_codes"] = matrix_rows(spec.state_voice_codes);
    j["noise_sd"] = spec.noise_sd;
    j["transition_matrix"] = matrix_rows(spec.transition_matrix);
    if (spec.post_event_transition_matrix)
        j["post_event_transition_matrix"] = matrix_rows(*spec.post_event_transition_matrix);
    else j["post_event_transition_matrix"] = nullptr;
    if (spec.event_day) j["event_day"] = *spec.event_day;
    else j["event_day"] = nullptr;
    ordered_json rr;
    rr["high_fraction"] = spec.high_responder_fraction;
    rr["extra_responses"] = spec.high_responder_extra;
    j["response_rate_distribution"] = rr;
    j["missingness_rate"] = spec.missingness_rate;
    j["assessment_schedule_days"] = spec.assessment_schedule_days;
    j["assessment_noise_sd"] = spec.assessment_noise_sd;
    j["lambda"] = spec.lambda;
    j["voice_raw_features"] = spec.voice_raw_features;
    j["voice_noise_sd"] = spec.voice_noise_sd;
    j["seed"] = spec.seed;
    return j;
}

CohortSpec cohort_spec_from_json(const ordered_json& j) {
    CohortSpec spec;
    auto matrix_from = [](const ordered_json& rows) {
        if (rows.empty()) return Matrix();
        Matrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols()) throw ConfigError("ragged matrix in cohort spec");
            for (std::size_t c = 0; c < m.cols(); ++c) m(i, c) = rows[i][c].get<double>();
        }
        return m;
    };
    spec.n_participants = j.at("n_participants").get<int>();
    spec.days_per_participant = j.at("days_per_participant").get<int>();
    spec.n_states = j.at("n_states").get<int>();
    spec.state_feature_means = matrix_from(j.at("state_feature_means"));
    spec.state_mobility = j.at("state_mobility").get<std::vector<double>>();
    spec.state_voice_codes = matrix_from(j.at("state_voice_codes"));
    spec.noise_sd = j.at("noise_sd").get<double>();
    spec.transition_matrix = matrix_from(j.at("transition_matrix"));
    if (!j.at("post_event_transition_matrix").is_null())
        spec.post_event_transition_matrix = matrix_from(j.at("post_event_transition_matrix"));
    if (!j.at("event_day").is_null()) spec.event_day = j.at("event_day").get<int>();
    const auto& rr = j.at("response_rate_distribution");
    spec.high_responder_fraction = rr.at("high_fraction").get<double>();
    spec.high_responder_extra = rr.at("extra_responses").get<double>();
    spec.missingness_rate = j.at("missingness_rate").get<double>();
    spec.assessment_schedule_days = j.at("assessment_schedule_days").get<int>();
    spec.assessment_noise_sd = j.at("assessment_noise_sd").get<double>();
    spec.lambda = j.at("lambda").get<double>();
    spec.voice_raw_features = j.at("voice_raw_features").get<int>();
    spec.voice_noise_sd = j.at("voice_noise_sd").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.check();
    return spec;
}

std::vector<double> stationary_distribution(const Matrix& transition) {
    const std::size_t n = transition.rows();
    std::vector<double> pi(n, 1.0 / double(n)), next(n);
    for (int iter = 0; iter < 10000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * transition(i, j);
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff += std::fabs(next[j] - pi[j]);
        pi.swap(next);
        if (diff < 1e-13) break;
    }
    return pi;
}

SynthResult generate_cohort(const CohortSpec& spec, const std::string& out_dir) {
    spec.check();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create directory " + out_dir + ": " + ec.message());
    auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    SynthResult result;
    for (int s = 0; s < spec.n_states; ++s) {
        result.truth.quality_order.push_back(s);
        result.truth.quality.push_back(
            spec.n_states == 1 ? 1.0 : 1.0 - double(s) / double(spec.n_states - 1));
    }

    // questions.csv
    {
        auto out = open_out(path("questions.csv"));
        csv::write_row(out, {"question_id", "category", "scale_min", "scale_max", "polarity"});
        for (const auto& q : kQuestions)
            csv::write_row(out, {q.id, q.category, fmt_double(q.lo), fmt_double(q.hi),
                                 q.polarity});
        result.files.push_back(path("questions.csv"));
    }

    // Fixed voice mixing matrix (raw features x code dims), shared by the
    // whole cohort.
    Matrix voice_mix;
    std::vector<double> voice_age_coef, voice_sex_coef;
    if (spec.with_voice()) {
        Rng rng(Rng::derive(spec.seed, 0x701ce));
        const std::size_t vd = spec.state_voice_codes.cols();
        voice_mix = Matrix(std::size_t(spec.voice_raw_features), vd);
        for (std::size_t i = 0; i < voice_mix.rows(); ++i)
            for (std::size_t c = 0; c < vd; ++c) voice_mix(i, c) = rng.next_normal();
        // Orthonormalize columns so code separation carries through intact.
        for (std::size_t c = 0; c < vd; ++c) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                double proj = 0.0;
                for (std::size_t i = 0; i < voice_mix.rows(); ++i)
                    proj += voice_mix(i, c) * voice_mix(i, prev);
                for (std::size_t i = 0; i < voice_mix.rows(); ++i)
                    voice_mix(i, c) -= proj * voice_mix(i, prev);
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < voice_mix.rows(); ++i)
                nrm += voice_mix(i, c) * voice_mix(i, c);
            nrm = std::sqrt(nrm);
            if (nrm < 1e-12) throw InvariantError("degenerate voice mixing matrix");
            for (std::size_t i = 0; i < voice_mix.rows(); ++i) voice_mix(i, c) /= nrm;
        }
        for (int i = 0; i < spec.voice_raw_features; ++i) {
            voice_age_coef.push_back(0.02 * rng.next_normal());
            voice_sex_coef.push_back(0.5 * rng.next_normal());
        }
    }

    const std::vector<double> initial = stationary_distribution(spec.transition_matrix);

    auto records_out = open_out(path("records.csv"));
    csv::write_row(records_out, {"participant_id", "date", "question_id", "value"});
    auto demo_out = open_out(path("demographics.csv"));
    csv::write_row(demo_out, {"participant_id", "age", "sex"});
    std::ofstream acti_out, voice_out, events_out;
    if (spec.with_mobility()) {
        acti_out = open_out(path("actigraphy.csv"));
        csv::write_row(acti_out, {"participant_id", "timestamp", "activity_rate"});
    }
    if (spec.with_voice()) {
        voice_out = open_out(path("voice.csv"));
        std::vector<std::string> header = {"participant_id", "date"};
        for (int f = 0; f < spec.voice_raw_features; ++f)
            header.push_back("voice_f" + std::to_string(f + 1));
        csv::write_row(voice_out, header);
    }
    if (spec.event_day) {
        events_out = open_out(path("events.csv"));
        csv::write_row(events_out, {"participant_id", "date", "event_type"});
    }
    auto truth_out = open_out(path("ground_truth.csv"));
    csv::write_row(truth_out, {"participant_id", "date", "state"});

    // Zone sampling intervals: zone z spans [thr[z-1], thr[z]) with the
    // default thresholds 1,2,3,4 and a unit-wide top zone.
    const double zone_edges[6] = {0, 1, 2, 3, 4, 5};

    for (int p = 0; p < spec.n_participants; ++p) {
        const std::string pid = participant_name(p, spec.n_participants);
        Rng rng(Rng::derive(spec.seed, 0x9a27 + std::uint64_t(p)));

        const double age = 40.0 + std::floor(rng.next_double() * 36.0);  // 40..75
        const double sex = rng.next_double() < 0.405 ? 1.0 : 0.0;
        csv::write_row(demo_out, {pid, fmt_double(age), fmt_double(sex)});
        const bool high_responder = rng.next_double() < spec.high_responder_fraction;

        int state = draw_categorical(rng, initial);
        for (int day = 0; day < spec.days_per_participant; ++day) {
            const Date date = kStartDate.plus_days(day);
            if (day > 0) {
                const Matrix& chain =
                    (spec.event_day && spec.post_event_transition_matrix && day > *spec.event_day)
                        ? *spec.post_event_transition_matrix
                        : spec.transition_matrix;
                state = draw_categorical(rng, chain.row(std::size_t(state)));
            }
            result.truth.states[{pid, date}] = state;
            csv::write_row(truth_out, {pid, date.to_string(), std::to_string(state)});

            // Per-question normalized targets for this state.
            const auto means = spec.state_feature_means.row(std::size_t(state));
            const double interference_target = 0.8 * means[kPain];
            const double adl_target = means[kActivity] + spec.lambda * interference_target;
            for (const auto& q : kQuestions) {
                if (rng.next_double() < spec.missingness_rate) continue;
                double target = 0.0;
                const std::string qid = q.id;
                if (qid.rfind("pain", 0) == 0) target = means[kPain];
                else if (qid == "mood") target = means[kMood];
                else if (qid.rfind("sleep", 0) == 0) target = means[kSleep];
                else if (qid == "alertness") target = means[kAlertness];
                else if (qid.rfind("med", 0) == 0) target = means[kMedication];
                else if (qid == "activity_adl") target = adl_target;
                else target = interference_target;
                const int n_responses =
                    1 + (high_responder ? rng.next_poisson(spec.high_responder_extra) : 0);
                for (int rsp = 0; rsp < n_responses; ++rsp) {
                    const double v =
                        std::clamp(target + spec.noise_sd * rng.next_normal(), 0.0, 1.0);
                    const double raw = q.lo + v * (q.hi - q.lo);
                    csv::write_row(records_out,
                                   {pid, date.to_string(), q.id, fmt_double(raw)});
                }
            }

            if (spec.with_mobility()) {
                const auto zones = zone_profile(spec.state_mobility[std::size_t(state)]);
                // 48 windows, 09:00 to 17:00, one sample per 10-minute window.
                for (int w = 0; w < 48; ++w) {
                    const int z = draw_categorical(rng, zones);
                    const double rate = zone_edges[z] +
                                        rng.next_double() * (zone_edges[z + 1] - zone_edges[z]);
                    const int seconds = 9 * 3600 + w * 600;
                    char ts[32];
                    std::snprintf(ts, sizeof(ts), "%sT%02d:%02d:00", date.to_string().c_str(),
                                  seconds / 3600, (seconds % 3600) / 60);
                    csv::write_row(acti_out, {pid, ts, fmt_double(rate)});
                }
            }

            if (spec.with_voice()) {
                std::vector<std::string> fields = {pid, date.to_string()};
                const auto code = spec.state_voice_codes.row(std::size_t(state));
                for (int f = 0; f < spec.voice_raw_features; ++f) {
                    double v = 0.0;
                    for (std::size_t c = 0; c < code.size(); ++c)
                        v += voice_mix(std::size_t(f), c) * code[c];
                    v += voice_age_coef[std::size_t(f)] * (age - 60.0) +
                         voice_sex_coef[std::size_t(f)] * sex +
                         spec.voice_noise_sd * rng.next_normal();
                    fields.push_back(fmt_double(v));
                }
                csv::write_row(voice_out, fields);
            }
        }

        if (spec.event_day)
            csv::write_row(events_out,
                           {pid, kStartDate.plus_days(*spec.event_day).to_string(),
                            "scs_implant"});
    }

    result.files.push_back(path("records.csv"));
    result.files.push_back(path("demographics.csv"));
    result.files.push_back(path("ground_truth.csv"));
    if (spec.with_mobility()) result.files.push_back(path("actigraphy.csv"));
    if (spec.with_voice()) result.files.push_back(path("voice.csv"));
    if (spec.event_day) result.files.push_back(path("events.csv"));
    return result;
}

void generate_assessments(const CohortSpec& spec, const GroundTruth& truth,
                          const std::string& path) {
    spec.check();
    auto out = open_out(path);
    csv::write_row(out, {"participant_id", "date", "instrument", "score"});

    for (int p = 0; p < spec.n_participants; ++p) {
        const std::string pid = participant_name(p, spec.n_participants);
        Rng rng(Rng::derive(spec.seed, 0xa55e55 + std::uint64_t(p)));
        const int offset = p % spec.assessment_schedule_days;
        for (int day = offset; day < spec.days_per_participant;
             day += spec.assessment_schedule_days) {
            // Local mean state quality over +/- 3 days.
            double q_sum = 0.0;
            int q_n = 0;
            for (int d = std::max(0, day - 3);
                 d <= std::min(spec.days_per_participant - 1, day + 3); ++d) {
                auto it = truth.states.find({pid, kStartDate.plus_days(d)});
                if (it == truth.states.end()) continue;
                q_sum += truth.quality[std::size_t(it->second)];
                ++q_n;
            }
            if (q_n == 0) continue;
            const double quality = q_sum / double(q_n);
            const Date date = kStartDate.plus_days(day);
            for (const auto& def : kInstrumentDefs) {
                const double span = def.hi - def.lo;
                const double base =
                    def.higher_is_worse ? def.lo + span * (1.0 - quality) : def.lo + span * quality;
                const double score = std::clamp(
                    base + spec.assessment_noise_sd * span * rng.next_normal(), def.lo, def.hi);
                csv::write_row(out, {pid, date.to_string(), to_string(def.instrument),
                                     fmt_double(score)});
            }
        }
    }
}

}  // namespace painstates
