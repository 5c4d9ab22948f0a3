#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "painstates/jsonio.hpp"
#include "painstates/matrix.hpp"

namespace painstates {

/// Parameters of a synthetic cohort with known latent states. Feature means
/// live in normalized composite space (pain, mood, sleep, alertness,
/// medication, activity), one row per state, states ordered best to worst.
struct CohortSpec {
    int n_participants = 120;
    int days_per_participant = 100;
    int n_states = 5;
    Matrix state_feature_means;  // n_states x 6
    /// Per-state effective-mobility target in [0,1]; empty disables the
    /// actigraphy stream.
    std::vector<double> state_mobility;
    /// Per-state latent voice code (n_states x code dims); empty disables the
    /// voice stream. Raw voice features are a fixed linear mixture of the
    /// code plus age/sex effects plus noise.
    Matrix state_voice_codes;
    double noise_sd = 0.5;  // per-question, in normalized units
    Matrix transition_matrix;  // n_states x n_states, row-stochastic
    std::optional<Matrix> post_event_transition_matrix;
    std::optional<int> event_day;  // study-day index of the clinical event
    /// Response-rate heterogeneity: a fraction of participants answers each
    /// question 1 + Poisson(extra) times per day.
    double high_responder_fraction = 0.1;
    double high_responder_extra = 2.0;
    double missingness_rate = 0.02;  // per question-day
    int assessment_schedule_days = 14;
    double assessment_noise_sd = 0.05;  // fraction of each instrument's range
    double lambda = 1.0;  // activity penalty assumed by the generator
    int voice_raw_features = 12;
    double voice_noise_sd = 0.25;
    std::uint64_t seed = 20220101;

    bool with_mobility() const { return !state_mobility.empty(); }
    bool with_voice() const { return !state_voice_codes.empty(); }
    void check() const;
};

/// The default cohort: 5 states in 3 strongly separated groups; the two
/// states inside each of the first two groups share every questionnaire
/// composite except pain and are told apart only by their voice codes, so
/// the voice stream carries real state information.
CohortSpec default_cohort_spec();

/// Fully graded states (every feature monotone in state quality), mobility
/// on, voice off; the workhorse for ranking/selection/dwell oracles.
CohortSpec graded_cohort_spec(int n_states, int n_participants = 40, int days = 60);

ordered_json cohort_spec_to_json(const CohortSpec& spec);
CohortSpec cohort_spec_from_json(const ordered_json& j);

struct GroundTruth {
    std::vector<int> quality_order;  // state indices, best first
    std::vector<double> quality;     // per state, in [0,1], strictly decreasing
    std::map<std::pair<std::string, Date>, int> states;  // latent state per generated day
};

struct SynthResult {
    GroundTruth truth;
    std::vector<std::string> files;
};

/// Writes questions.csv, records.csv, demographics.csv, ground_truth.csv and,
/// when enabled, actigraphy.csv / voice.csv / events.csv into out_dir.
/// Deterministic: the same spec and seed produce byte-identical files.
SynthResult generate_cohort(const CohortSpec& spec, const std::string& out_dir);

/// Writes assessments.csv: on scheduled days every instrument scores a
/// monotone function of the local (+/- 3 day) mean state quality plus noise;
/// severity scales decrease with quality, VAS Health increases.
void generate_assessments(const CohortSpec& spec, const GroundTruth& truth,
                          const std::string& path);

/// Stationary distribution of a row-stochastic matrix (power iteration).
std::vector<double> stationary_distribution(const Matrix& transition);

}  // namespace painstates
