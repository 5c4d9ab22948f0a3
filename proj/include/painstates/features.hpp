#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "painstates/ingest.hpp"
#include "painstates/matrix.hpp"

namespace painstates {

enum class NormalizationMethod { scale_bounds_minmax, zscore };

std::string to_string(NormalizationMethod m);
NormalizationMethod normalization_from_string(const std::string& s);

struct AffineTransform {
    double offset = 0.0;
    double scale = 1.0;  // never 0
};

/// Per-question affine normalization: normalized = (raw - offset) / scale.
struct NormalizationParams {
    NormalizationMethod method = NormalizationMethod::scale_bounds_minmax;
    std::map<std::string, AffineTransform> per_question;

    double apply(const std::string& question_id, double raw) const;
    double invert(const std::string& question_id, double normalized) const;
    DailyRecord apply(const DailyRecord& record) const;
};

/// minmax uses the registry scale bounds (data independent); zscore uses the
/// per-question sample mean/SD over the table. A constant column under zscore
/// is a degenerate-scale error naming the question.
NormalizationParams fit_normalization(const CohortTable& table, NormalizationMethod method);

/// The six questionnaire composites, in canonical order.
inline constexpr std::array<const char*, 6> kCompositeNames = {
    "pain", "mood", "sleep", "alertness", "medication", "activity"};

struct ComposeOptions {
    /// Weight of the pain-interference penalty in the activity difference
    /// score: activity = adl - lambda * interference.
    double lambda = 1.0;
};

/// Builds the composites from a record of normalized responses: pain, sleep
/// and medication are category means; mood and alertness pass through;
/// activity is the ADL/interference difference score.
std::map<std::string, double> compose(const DailyRecord& normalized,
                                      const QuestionRegistry& registry,
                                      const ComposeOptions& options = {});

struct Residualization {
    Matrix residuals;
    /// p x 3 — intercept, age slope, sex slope per feature column.
    Matrix coefficients;
    bool intercept_only = false;
    std::vector<std::string> warnings;
};

/// Replaces every column of X with its ordinary least squares residuals on
/// [1, age, sex]. A rank-deficient design falls back to intercept-only
/// (columns minus their means) with a warning.
Residualization residualize(const Matrix& X, std::span<const double> age,
                            std::span<const double> sex);

struct VoiceComponents {
    std::vector<std::string> input_features;  // raw voice column names
    std::vector<double> column_means;         // centering used before projection
    Matrix loadings;                          // features x retained components, orthonormal
    std::vector<double> explained_variance_ratio;
    Matrix scores;  // samples x retained components
    Matrix residual_coefficients;  // features x 3 (intercept, age, sex)
    bool residual_intercept_only = false;
};

/// PCA by singular value decomposition of the centered matrix; keeps exactly
/// the components whose explained variance ratio meets var_threshold (none
/// qualify on a sufficiently isotropic table). Loading signs are fixed so
/// each component's largest-magnitude entry is positive.
VoiceComponents pca_reduce(const Matrix& residuals, double var_threshold);

struct VoiceTable {
    std::vector<std::string> participant_ids;  // row keys
    std::vector<Date> dates;
    std::vector<std::string> feature_names;
    Matrix values;
};

// `voice.csv`: participant_id,date,<feature columns...>
VoiceTable parse_voice_table(std::istream& in);

struct VoiceScores {
    std::vector<std::string> participant_ids;
    std::vector<Date> dates;
    std::vector<std::string> component_names;  // voice_pc_1..m
    Matrix scores;
    VoiceComponents components;
};

/// Residualize (age/sex from demographics) then pca_reduce; duplicate
/// (participant, date) rows have their scores averaged.
VoiceScores reduce_voice_table(const VoiceTable& table, const Demographics& demographics,
                               double var_threshold);

struct ActigraphySample {
    std::string participant_id;
    Date date;
    int seconds_of_day = 0;
    double activity_rate = 0.0;
};

// `actigraphy.csv`: participant_id,timestamp,activity_rate
std::vector<ActigraphySample> parse_actigraphy(std::istream& in);

/// Distinct covered days per participant, for the smartwatch inclusion rule.
std::map<std::string, int> actigraphy_coverage(const std::vector<ActigraphySample>& samples);

struct ZoneConfig {
    int window_minutes = 10;
    /// Strictly increasing; four thresholds define Zones 0..4. A window whose
    /// mean rate is below thresholds[0] is Zone 0; at or above thresholds[3]
    /// is Zone 4 (half-open intervals).
    std::array<double, 4> thresholds{1.0, 2.0, 3.0, 4.0};
    /// Shifts the day boundary used to bucket windows (minutes).
    int day_offset_minutes = 0;
};

struct MobilityProfile {
    std::string participant_id;
    Date date;
    std::array<double, 5> zone_fractions{};
    double effective_mobility = 0.0;  // sum_z (z/4) * fraction_z
};

/// Buckets samples into fixed windows per day, assigns each window the zone
/// containing its mean rate, and reduces each day to zone occupancy
/// fractions. Days with no windows produce no profile.
std::vector<MobilityProfile> derive_zones(const std::vector<ActigraphySample>& samples,
                                          const ZoneConfig& config);

/// A flat per-day feature table; rows sorted by (participant_id, date). NaN
/// marks a modality missing on that day (only produced by outer joins).
struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<std::string> participant_ids;
    std::vector<Date> dates;
    Matrix values;

    std::size_t size() const { return participant_ids.size(); }
};

enum class JoinMode { inner, outer };

struct AssembleOptions {
    ComposeOptions compose;
    bool use_mobility = false;
    bool use_voice = false;
};

struct AssembleSummary {
    std::size_t questionnaire_days = 0;
    std::size_t mobility_days_matched = 0;
    std::size_t voice_days_matched = 0;
    std::size_t rows = 0;
};

/// Joins the questionnaire composites with the enabled modalities on
/// (participant, date). Inner mode drops days lacking any enabled modality
/// (the complete-case rule); outer mode keeps all questionnaire days and
/// marks absent modality cells NaN.
FeatureTable assemble_features(const CohortTable& cohort, const NormalizationParams& params,
                               const AssembleOptions& options,
                               const std::vector<MobilityProfile>* mobility = nullptr,
                               const VoiceScores* voice = nullptr,
                               JoinMode mode = JoinMode::inner,
                               AssembleSummary* summary = nullptr);

void write_feature_table(std::ostream& out, const FeatureTable& table);
FeatureTable read_feature_table(std::istream& in);

/// Column-selects `names` and keeps only rows complete in them.
FeatureTable select_features(const FeatureTable& table, const std::vector<std::string>& names);

}  // namespace painstates
