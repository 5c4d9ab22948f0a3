#pragma once

#include <istream>
#include <string>
#include <vector>

#include "painstates/jsonio.hpp"
#include "painstates/model.hpp"
#include "painstates/stats.hpp"

namespace painstates {

enum class Instrument { ODI, EQ5D_PAIN, EQ5D_ACTIVITIES, EQ5D_VAS_HEALTH };

inline constexpr std::array<Instrument, 4> kInstruments = {
    Instrument::ODI, Instrument::EQ5D_PAIN, Instrument::EQ5D_ACTIVITIES,
    Instrument::EQ5D_VAS_HEALTH};

std::string to_string(Instrument ins);
Instrument instrument_from_string(const std::string& s);

/// VAS Health scores health on a positive scale; everything else scores
/// severity.
Polarity orientation(Instrument ins);

struct AssessmentRecord {
    std::string participant_id;
    Date date;
    Instrument instrument = Instrument::ODI;
    double score = 0.0;
};

// `assessments.csv`: participant_id,date,instrument,score
std::vector<AssessmentRecord> parse_assessments(std::istream& in);

/// One clustered day with its distances to every centroid.
struct SamplePoint {
    std::string participant_id;
    Date date;
    std::vector<double> distances;
};

struct ValidationPair {
    std::string participant_id;
    Date sample_date;
    Date assessment_date;
    Instrument instrument = Instrument::ODI;
    double score = 0.0;
    std::vector<double> distances;
    int day_gap = 0;  // assessment_date - sample_date, |gap| <= window
};

/// Pairs each assessment with the nearest sample day within the window (ties
/// to the earlier day). Assessments without an in-window sample are dropped;
/// no assessment is used twice. `dropped` (optional) receives the count.
std::vector<ValidationPair> pair_assessments(const std::vector<SamplePoint>& samples,
                                             const std::vector<AssessmentRecord>& assessments,
                                             int window_days = 7,
                                             std::size_t* dropped = nullptr);

struct ValidationCell {
    int state = 0;
    Instrument instrument = Instrument::ODI;
    double r = 0.0;
    double p_parametric = 1.0;
    double p_permutation = 1.0;
    std::size_t n_pairs = 0;
};

struct ValidationReport {
    int k = 0;
    std::vector<ValidationCell> cells;
    std::vector<double> ranking_scores;       // per state index
    std::vector<std::string> ordinal_labels;  // per state index, "A" best
    std::vector<std::string> warnings;
};

struct ValidationOptions {
    int n_permutations = 10000;
    std::uint64_t seed = 0;
};

/// Correlates distance-to-each-state with every instrument's scores over the
/// pooled pairs, attaches both p-values, and ranks the states. Instruments
/// with fewer than 3 pairs are excluded with a warning.
ValidationReport validate_states(const ClusterModel& model,
                                 const std::vector<ValidationPair>& pairs,
                                 const ValidationOptions& options = {});

/// Ordinal ranking from the correlation table: score each state by the mean
/// orientation-signed correlation (+1 for severity scales, -1 for VAS), sort
/// descending, label A, B, ... Ties break toward the lower centroid pain
/// coordinate.
std::vector<std::string> rank_states(const ClusterModel& model,
                                     const std::vector<ValidationCell>& cells,
                                     std::vector<double>* scores_out = nullptr);

ordered_json validation_to_json(const ValidationReport& report);
void save_validation(const ValidationReport& report, const std::string& path);

}  // namespace painstates
