#include "painstates/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "painstates/csv.hpp"

namespace painstates {

std::string to_string(Instrument ins) {
    switch (ins) {
        case Instrument::ODI: return "ODI";
        case Instrument::EQ5D_PAIN: return "EQ5D_PAIN";
        case Instrument::EQ5D_ACTIVITIES: return "EQ5D_ACTIVITIES";
        case Instrument::EQ5D_VAS_HEALTH: return "EQ5D_VAS_HEALTH";
    }
    throw InvariantError("bad instrument");
}

Instrument instrument_from_string(const std::string& s) {
    if (s == "ODI") return Instrument::ODI;
    if (s == "EQ5D_PAIN") return Instrument::EQ5D_PAIN;
    if (s == "EQ5D_ACTIVITIES") return Instrument::EQ5D_ACTIVITIES;
    if (s == "EQ5D_VAS_HEALTH") return Instrument::EQ5D_VAS_HEALTH;
    throw SchemaError("unknown instrument '" + s + "'");
}

Polarity orientation(Instrument ins) {
    return ins == Instrument::EQ5D_VAS_HEALTH ? Polarity::higher_is_better
                                              : Polarity::higher_is_worse;
}

std::vector<AssessmentRecord> parse_assessments(std::istream& in) {
    csv::Reader reader(in, {"participant_id", "date", "instrument", "score"}, "assessments.csv");
    std::vector<AssessmentRecord> out;
    while (auto row = reader.next()) {
        if (row->fields.size() != 4)
            throw ParseError("assessments.csv line " + std::to_string(row->line_number) +
                             ": expected 4 fields");
        AssessmentRecord rec;
        rec.participant_id = row->fields[0];
        rec.date = Date::parse(row->fields[1]);
        rec.instrument = instrument_from_string(row->fields[2]);
        rec.score = csv::parse_number(row->fields[3], "assessments.csv", row->line_number);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ValidationPair> pair_assessments(const std::vector<SamplePoint>& samples,
                                             const std::vector<AssessmentRecord>& assessments,
                                             int window_days, std::size_t* dropped) {
    if (window_days < 0) throw ConfigError("window_days must be >= 0");

    std::map<std::string, std::vector<const SamplePoint*>> by_participant;
    for (const auto& s : samples) by_participant[s.participant_id].push_back(&s);
    for (auto& [pid, list] : by_participant)
        std::sort(list.begin(), list.end(),
                  [](const SamplePoint* a, const SamplePoint* b) { return a->date < b->date; });

    // Process assessments in a deterministic order regardless of input order.
    std::vector<const AssessmentRecord*> ordered;
    for (const auto& a : assessments) ordered.push_back(&a);
    std::sort(ordered.begin(), ordered.end(),
              [](const AssessmentRecord* a, const AssessmentRecord* b) {
                  return std::tie(a->participant_id, a->date, a->instrument, a->score) <
                         std::tie(b->participant_id, b->date, b->instrument, b->score);
              });

    std::vector<ValidationPair> out;
    std::size_t drop_count = 0;
    for (const AssessmentRecord* a : ordered) {
        auto it = by_participant.find(a->participant_id);
        const SamplePoint* best = nullptr;
        int best_abs = window_days + 1;
        if (it != by_participant.end()) {
            for (const SamplePoint* s : it->second) {
                const int gap = std::abs(a->date.days_since(s->date));
                // Nearest wins; ties go to the earlier sample day, which the
                // ascending date scan already visits first.
                if (gap < best_abs) {
                    best_abs = gap;
                    best = s;
                }
            }
        }
        if (!best) {
            ++drop_count;
            continue;
        }
        ValidationPair pair;
        pair.participant_id = a->participant_id;
        pair.sample_date = best->date;
        pair.assessment_date = a->date;
        pair.instrument = a->instrument;
        pair.score = a->score;
        pair.distances = best->distances;
        pair.day_gap = a->date.days_since(best->date);
        out.push_back(std::move(pair));
    }
    if (dropped) *dropped = drop_count;
    return out;
}

std::vector<std::string> rank_states(const ClusterModel& model,
                                     const std::vector<ValidationCell>& cells,
                                     std::vector<double>* scores_out) {
    const std::size_t k = std::size_t(model.k);
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (const auto& cell : cells) {
        const double sign = orientation(cell.instrument) == Polarity::higher_is_worse ? 1.0 : -1.0;
        sum[std::size_t(cell.state)] += sign * cell.r;
        ++count[std::size_t(cell.state)];
    }
    std::vector<double> score(k, 0.0);
    for (std::size_t s = 0; s < k; ++s) {
        if (count[s] == 0) throw DataError("state " + std::to_string(s) + " has no correlations");
        score[s] = sum[s] / double(count[s]);
    }

    // Pain coordinate for tie-breaking (lower pain wins).
    std::size_t pain_col = 0;
    const auto pain_it =
        std::find(model.feature_names.begin(), model.feature_names.end(), "pain");
    const bool has_pain = pain_it != model.feature_names.end();
    if (has_pain) pain_col = std::size_t(pain_it - model.feature_names.begin());

    std::vector<std::size_t> order(k);
    for (std::size_t s = 0; s < k; ++s) order[s] = s;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        if (has_pain && model.centroids(a, pain_col) != model.centroids(b, pain_col))
            return model.centroids(a, pain_col) < model.centroids(b, pain_col);
        return a < b;
    });

    std::vector<std::string> labels(k);
    for (std::size_t r = 0; r < k; ++r) labels[order[r]] = ordinal_label(r);
    if (scores_out) *scores_out = score;
    return labels;
}

ValidationReport validate_states(const ClusterModel& model,
                                 const std::vector<ValidationPair>& pairs,
                                 const ValidationOptions& options) {
    model.check();
    ValidationReport report;
    report.k = model.k;

    std::map<Instrument, std::vector<const ValidationPair*>> by_instrument;
    for (const auto& p : pairs) {
        if (p.distances.size() != std::size_t(model.k))
            throw DataError("pair distance vector does not match model k");
        by_instrument[p.instrument].push_back(&p);
    }

    std::uint64_t cell_stream = 0;
    for (Instrument ins : kInstruments) {
        auto it = by_instrument.find(ins);
        const std::size_t n = it == by_instrument.end() ? 0 : it->second.size();
        if (n < 3) {
            report.warnings.push_back("instrument " + to_string(ins) + " has " +
                                      std::to_string(n) + " pairs (< 3); excluded");
            cell_stream += std::size_t(model.k);
            continue;
        }
        std::vector<double> scores(n);
        for (std::size_t i = 0; i < n; ++i) scores[i] = it->second[i]->score;
        for (int s = 0; s < model.k; ++s, ++cell_stream) {
            std::vector<double> dist(n);
            for (std::size_t i = 0; i < n; ++i) dist[i] = it->second[i]->distances[std::size_t(s)];
            ValidationCell cell;
            cell.state = s;
            cell.instrument = ins;
            try {
                const Correlation c = correlate(dist, scores);
                cell.r = c.r;
                cell.p_parametric = c.p_parametric;
                cell.n_pairs = c.n;
                cell.p_permutation = permutation_test(
                    dist, scores, options.n_permutations,
                    Rng::derive(options.seed, 0xce11'0000 + cell_stream));
            } catch (const DataError& e) {
                report.warnings.push_back("state " + std::to_string(s) + " x " + to_string(ins) +
                                          ": " + e.what());
                continue;
            }
            report.cells.push_back(cell);
        }
    }

    if (report.cells.empty()) throw DataError("no instrument had enough pairs to validate");
    report.ordinal_labels = rank_states(model, report.cells, &report.ranking_scores);
    return report;
}

ordered_json validation_to_json(const ValidationReport& report) {
    ordered_json j;
    j["k"] = report.k;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : report.cells) {
        ordered_json c;
        c["state"] = cell.state;
        c["instrument"] = to_string(cell.instrument);
        c["r"] = cell.r;
        c["p_parametric"] = cell.p_parametric;
        c["p_permutation"] = cell.p_permutation;
        c["n_pairs"] = cell.n_pairs;
        cells.push_back(c);
    }
    j["cells"] = cells;
    j["ranking_scores"] = report.ranking_scores;
    j["ordinal_labels"] = report.ordinal_labels;
    j["warnings"] = report.warnings;
    return j;
}

void save_validation(const ValidationReport& report, const std::string& path) {
    save_json(path, validation_to_json(report));
}

}  // namespace painstates
