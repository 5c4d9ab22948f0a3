#pragma once

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "painstates/common.hpp"

namespace painstates {

enum class Category {
    pain,
    mood,
    sleep,
    alertness,
    medication,
    activity_adl,
    activity_interference,
};

enum class Polarity { higher_is_better, higher_is_worse };

std::string to_string(Category c);
Category category_from_string(const std::string& s);
std::string to_string(Polarity p);
Polarity polarity_from_string(const std::string& s);

struct QuestionSpec {
    std::string question_id;
    Category category;
    double scale_min = 0.0;
    double scale_max = 0.0;
    Polarity polarity = Polarity::higher_is_worse;
};

class QuestionRegistry {
public:
    QuestionRegistry() = default;
    explicit QuestionRegistry(std::vector<QuestionSpec> questions);

    const std::vector<QuestionSpec>& questions() const { return questions_; }
    std::size_t size() const { return questions_.size(); }
    bool empty() const { return questions_.empty(); }
    const QuestionSpec* find(const std::string& question_id) const;
    const QuestionSpec& at(const std::string& question_id) const;
    std::vector<const QuestionSpec*> by_category(Category c) const;

private:
    std::vector<QuestionSpec> questions_;
    std::map<std::string, std::size_t> index_;
};

// `questions.csv`: question_id,category,scale_min,scale_max,polarity
QuestionRegistry parse_question_registry(std::istream& in);

/// One participant-day before same-day aggregation; each question may hold
/// several responses.
struct RawDailyRecord {
    std::string participant_id;
    Date date;
    std::map<std::string, std::vector<double>> responses;
};

/// One participant-day after aggregation: at most one value per question.
struct DailyRecord {
    std::string participant_id;
    Date date;
    std::map<std::string, double> responses;
};

struct CohortTable {
    std::vector<DailyRecord> records;  // sorted by (participant_id, date)
    QuestionRegistry registry;
    std::set<std::string> participants;
    /// Raw responses per active day, per participant; feeds the
    /// high-responder robustness split.
    std::map<std::string, double> responses_per_day;

    /// Scan check: every record covers every registry question.
    void check_complete() const;
};

// `records.csv`: participant_id,date,question_id,value. Values are range
// checked against the registry; unknown question ids are schema errors.
// Returned records are sorted by (participant_id, date) with response lists
// sorted, so any row order produces an identical result.
std::vector<RawDailyRecord> parse_daily_records(std::istream& in, const QuestionRegistry& registry);

// Same-day multi-responses collapse to their arithmetic mean.
std::vector<DailyRecord> aggregate_daily(const std::vector<RawDailyRecord>& records);

// Raw responses per day with >= 1 response, per participant.
std::map<std::string, double> response_rates(const std::vector<RawDailyRecord>& records);

struct FilterOptions {
    int min_days = 10;
    bool require_watch = false;
    int min_watch_days = 10;
};

/// Applies the completeness rules in order: (1) drop days missing any
/// registry question, (2) drop participants with fewer than min_days
/// surviving days, (3) when require_watch, drop participants with fewer than
/// min_watch_days days of actigraphy coverage (`watch_days` maps participant
/// to distinct covered days; missing entries count as 0).
CohortTable filter_complete(std::vector<DailyRecord> records, const QuestionRegistry& registry,
                            const FilterOptions& options,
                            const std::map<std::string, int>* watch_days = nullptr,
                            const std::map<std::string, double>* rates = nullptr);

struct Demographics {
    std::map<std::string, double> age;
    std::map<std::string, double> sex;  // coded 0/1
};

// `demographics.csv`: participant_id,age,sex
Demographics parse_demographics(std::istream& in);

}  // namespace painstates
