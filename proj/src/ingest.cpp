#include "painstates/ingest.hpp"

#include <algorithm>

#include "painstates/csv.hpp"

namespace painstates {

std::string to_string(Category c) {
    switch (c) {
        case Category::pain: return "pain";
        case Category::mood: return "mood";
        case Category::sleep: return "sleep";
        case Category::alertness: return "alertness";
        case Category::medication: return "medication";
        case Category::activity_adl: return "activity_adl";
        case Category::activity_interference: return "activity_interference";
    }
    throw InvariantError("bad category");
}

Category category_from_string(const std::string& s) {
    if (s == "pain") return Category::pain;
    if (s == "mood") return Category::mood;
    if (s == "sleep") return Category::sleep;
    if (s == "alertness") return Category::alertness;
    if (s == "medication") return Category::medication;
    if (s == "activity_adl") return Category::activity_adl;
    if (s == "activity_interference") return Category::activity_interference;
    throw SchemaError("unknown question category '" + s + "'");
}

std::string to_string(Polarity p) {
    return p == Polarity::higher_is_better ? "higher_is_better" : "higher_is_worse";
}

Polarity polarity_from_string(const std::string& s) {
    if (s == "higher_is_better") return Polarity::higher_is_better;
    if (s == "higher_is_worse") return Polarity::higher_is_worse;
    throw SchemaError("unknown polarity '" + s + "'");
}

QuestionRegistry::QuestionRegistry(std::vector<QuestionSpec> questions)
    : questions_(std::move(questions)) {
    for (std::size_t i = 0; i < questions_.size(); ++i) {
        const auto& q = questions_[i];
        if (q.question_id.empty()) throw SchemaError("question with empty id");
        if (!(q.scale_min < q.scale_max))
            throw SchemaError("question '" + q.question_id + "': scale_min must be < scale_max");
        if (!index_.emplace(q.question_id, i).second)
            throw SchemaError("duplicate question id '" + q.question_id + "'");
    }
}

const QuestionSpec* QuestionRegistry::find(const std::string& question_id) const {
    auto it = index_.find(question_id);
    return it == index_.end() ? nullptr : &questions_[it->second];
}

const QuestionSpec& QuestionRegistry::at(const std::string& question_id) const {
    const QuestionSpec* q = find(question_id);
    if (!q) throw SchemaError("unknown question id '" + question_id + "'");
    return *q;
}

std::vector<const QuestionSpec*> QuestionRegistry::by_category(Category c) const {
    std::vector<const QuestionSpec*> out;
    for (const auto& q : questions_)
        if (q.category == c) out.push_back(&q);
    return out;
}

QuestionRegistry parse_question_registry(std::istream& in) {
    csv::Reader reader(in, {"question_id", "category", "scale_min", "scale_max", "polarity"},
                       "questions.csv");
    std::vector<QuestionSpec> questions;
    while (auto row = reader.next()) {
        if (row->fields.size() != 5)
            throw ParseError("questions.csv line " + std::to_string(row->line_number) +
                             ": expected 5 fields");
        QuestionSpec q;
        q.question_id = row->fields[0];
        q.category = category_from_string(row->fields[1]);
        q.scale_min = csv::parse_number(row->fields[2], "questions.csv", row->line_number);
        q.scale_max = csv::parse_number(row->fields[3], "questions.csv", row->line_number);
        q.polarity = polarity_from_string(row->fields[4]);
        questions.push_back(std::move(q));
    }
    return QuestionRegistry(std::move(questions));
}

std::vector<RawDailyRecord> parse_daily_records(std::istream& in,
                                                const QuestionRegistry& registry) {
    if (registry.empty()) throw ConfigError("question registry is empty");
    csv::Reader reader(in, {"participant_id", "date", "question_id", "value"}, "records.csv");

    std::map<std::pair<std::string, Date>, RawDailyRecord> by_day;
    while (auto row = reader.next()) {
        if (row->fields.size() != 4)
            throw ParseError("records.csv line " + std::to_string(row->line_number) +
                             ": expected 4 fields");
        const std::string& pid = row->fields[0];
        if (pid.empty())
            throw ParseError("records.csv line " + std::to_string(row->line_number) +
                             ": empty participant_id");
        Date date;
        try {
            date = Date::parse(row->fields[1]);
        } catch (const ParseError& e) {
            throw ParseError("records.csv line " + std::to_string(row->line_number) + ": " +
                             e.what());
        }
        const QuestionSpec* q = registry.find(row->fields[2]);
        if (!q)
            throw SchemaError("records.csv line " + std::to_string(row->line_number) +
                              ": unknown question id '" + row->fields[2] + "'");
        const double value = csv::parse_number(row->fields[3], "records.csv", row->line_number);
        if (value < q->scale_min || value > q->scale_max)
            throw RangeError("records.csv line " + std::to_string(row->line_number) + ": value " +
                             fmt_double(value) + " outside [" + fmt_double(q->scale_min) + ", " +
                             fmt_double(q->scale_max) + "] for question '" + q->question_id + "'");
        auto& rec = by_day[{pid, date}];
        rec.participant_id = pid;
        rec.date = date;
        rec.responses[q->question_id].push_back(value);
    }

    std::vector<RawDailyRecord> out;
    out.reserve(by_day.size());
    for (auto& [key, rec] : by_day) {
        // Sorted response lists make parsing independent of input row order.
        for (auto& [qid, values] : rec.responses) std::sort(values.begin(), values.end());
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<DailyRecord> aggregate_daily(const std::vector<RawDailyRecord>& records) {
    std::vector<DailyRecord> out;
    out.reserve(records.size());
    for (const auto& raw : records) {
        DailyRecord rec;
        rec.participant_id = raw.participant_id;
        rec.date = raw.date;
        for (const auto& [qid, values] : raw.responses) {
            // Values are kept sorted, so the mean is permutation invariant
            // down to the last bit.
            double sum = 0.0;
            for (double v : values) sum += v;
            rec.responses[qid] = sum / double(values.size());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::map<std::string, double> response_rates(const std::vector<RawDailyRecord>& records) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // (responses, days)
    for (const auto& rec : records) {
        std::size_t n = 0;
        for (const auto& [qid, values] : rec.responses) n += values.size();
        auto& c = counts[rec.participant_id];
        c.first += n;
        c.second += 1;
    }
    std::map<std::string, double> out;
    for (const auto& [pid, c] : counts) out[pid] = double(c.first) / double(c.second);
    return out;
}

void CohortTable::check_complete() const {
    for (const auto& rec : records) {
        for (const auto& q : registry.questions()) {
            if (!rec.responses.count(q.question_id))
                throw InvariantError("cohort record " + rec.participant_id + " " +
                                     rec.date.to_string() + " misses question '" + q.question_id +
                                     "'");
        }
        if (!participants.count(rec.participant_id))
            throw InvariantError("record for unknown participant " + rec.participant_id);
    }
}

CohortTable filter_complete(std::vector<DailyRecord> records, const QuestionRegistry& registry,
                            const FilterOptions& options,
                            const std::map<std::string, int>* watch_days,
                            const std::map<std::string, double>* rates) {
    if (options.min_days < 1) throw ConfigError("min_days must be >= 1");

    // Rule 1: drop any day missing a single data point.
    std::vector<DailyRecord> complete;
    complete.reserve(records.size());
    for (auto& rec : records) {
        bool ok = true;
        for (const auto& q : registry.questions()) {
            if (!rec.responses.count(q.question_id)) {
                ok = false;
                break;
            }
        }
        if (ok) complete.push_back(std::move(rec));
    }

    // Rule 2: participants need min_days surviving days.
    std::map<std::string, int> day_counts;
    for (const auto& rec : complete) ++day_counts[rec.participant_id];
    std::set<std::string> keep;
    for (const auto& [pid, n] : day_counts)
        if (n >= options.min_days) keep.insert(pid);

    // Rule 3: smartwatch coverage.
    if (options.require_watch) {
        for (auto it = keep.begin(); it != keep.end();) {
            int covered = 0;
            if (watch_days) {
                auto w = watch_days->find(*it);
                if (w != watch_days->end()) covered = w->second;
            }
            if (covered < options.min_watch_days) it = keep.erase(it);
            else ++it;
        }
    }

    CohortTable table;
    table.registry = registry;
    table.participants = keep;
    for (auto& rec : complete)
        if (keep.count(rec.participant_id)) table.records.push_back(std::move(rec));
    std::sort(table.records.begin(), table.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.participant_id, a.date) < std::tie(b.participant_id, b.date);
    });
    if (rates) {
        for (const auto& pid : keep) {
            auto it = rates->find(pid);
            if (it != rates->end()) table.responses_per_day[pid] = it->second;
        }
    }
    return table;
}

Demographics parse_demographics(std::istream& in) {
    csv::Reader reader(in, {"participant_id", "age", "sex"}, "demographics.csv");
    Demographics out;
    while (auto row = reader.next()) {
        if (row->fields.size() != 3)
            throw ParseError("demographics.csv line " + std::to_string(row->line_number) +
                             ": expected 3 fields");
        const std::string& pid = row->fields[0];
        if (out.age.count(pid))
            throw SchemaError("demographics.csv line " + std::to_string(row->line_number) +
                              ": duplicate participant '" + pid + "'");
        out.age[pid] = csv::parse_number(row->fields[1], "demographics.csv", row->line_number);
        const double sex = csv::parse_number(row->fields[2], "demographics.csv", row->line_number);
        if (sex != 0.0 && sex != 1.0)
            throw RangeError("demographics.csv line " + std::to_string(row->line_number) +
                             ": sex must be coded 0/1");
        out.sex[pid] = sex;
    }
    return out;
}

}  // namespace painstates
