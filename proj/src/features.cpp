#include "painstates/features.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "painstates/csv.hpp"

namespace painstates {

std::string to_string(NormalizationMethod m) {
    return m == NormalizationMethod::scale_bounds_minmax ? "scale_bounds_minmax" : "zscore";
}

NormalizationMethod normalization_from_string(const std::string& s) {
    if (s == "scale_bounds_minmax") return NormalizationMethod::scale_bounds_minmax;
    if (s == "zscore") return NormalizationMethod::zscore;
    throw ConfigError("unknown normalization method '" + s + "'");
}

double NormalizationParams::apply(const std::string& question_id, double raw) const {
    auto it = per_question.find(question_id);
    if (it == per_question.end())
        throw SchemaError("no normalization for question '" + question_id + "'");
    return (raw - it->second.offset) / it->second.scale;
}

double NormalizationParams::invert(const std::string& question_id, double normalized) const {
    auto it = per_question.find(question_id);
    if (it == per_question.end())
        throw SchemaError("no normalization for question '" + question_id + "'");
    return normalized * it->second.scale + it->second.offset;
}

DailyRecord NormalizationParams::apply(const DailyRecord& record) const {
    DailyRecord out;
    out.participant_id = record.participant_id;
    out.date = record.date;
    for (const auto& [qid, v] : record.responses) out.responses[qid] = apply(qid, v);
    return out;
}

NormalizationParams fit_normalization(const CohortTable& table, NormalizationMethod method) {
    if (table.records.empty()) throw DataError("cannot fit normalization on an empty table");
    NormalizationParams params;
    params.method = method;
    if (method == NormalizationMethod::scale_bounds_minmax) {
        for (const auto& q : table.registry.questions())
            params.per_question[q.question_id] = {q.scale_min, q.scale_max - q.scale_min};
        return params;
    }
    for (const auto& q : table.registry.questions()) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& rec : table.records) {
            auto it = rec.responses.find(q.question_id);
            if (it != rec.responses.end()) {
                sum += it->second;
                ++n;
            }
        }
        if (n < 2)
            throw DataError("question '" + q.question_id + "': too few values for zscore");
        const double mean = sum / double(n);
        double ss = 0.0;
        for (const auto& rec : table.records) {
            auto it = rec.responses.find(q.question_id);
            if (it != rec.responses.end()) {
                const double d = it->second - mean;
                ss += d * d;
            }
        }
        const double sd = std::sqrt(ss / double(n - 1));
        if (sd == 0.0)
            throw DataError("question '" + q.question_id +
                            "' is constant; zscore scale is degenerate");
        params.per_question[q.question_id] = {mean, sd};
    }
    return params;
}

namespace {

double category_mean(const DailyRecord& record, const QuestionRegistry& registry, Category c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const QuestionSpec* q : registry.by_category(c)) {
        auto it = record.responses.find(q->question_id);
        if (it == record.responses.end())
            throw DataError("record " + record.participant_id + " " + record.date.to_string() +
                            " misses question '" + q->question_id + "' (category " +
                            to_string(c) + ")");
        sum += it->second;
        ++n;
    }
    if (n == 0) throw DataError("registry has no question in category " + to_string(c));
    return sum / double(n);
}

}  // namespace

std::map<std::string, double> compose(const DailyRecord& normalized,
                                      const QuestionRegistry& registry,
                                      const ComposeOptions& options) {
    std::map<std::string, double> out;
    out["pain"] = category_mean(normalized, registry, Category::pain);
    out["mood"] = category_mean(normalized, registry, Category::mood);
    out["sleep"] = category_mean(normalized, registry, Category::sleep);
    out["alertness"] = category_mean(normalized, registry, Category::alertness);
    out["medication"] = category_mean(normalized, registry, Category::medication);
    const double adl = category_mean(normalized, registry, Category::activity_adl);
    const double interference =
        category_mean(normalized, registry, Category::activity_interference);
    out["activity"] = adl - options.lambda * interference;
    for (const auto& [name, v] : out)
        if (!std::isfinite(v))
            throw InvariantError("non-finite composite '" + name + "' for " +
                                 normalized.participant_id);
    return out;
}

Residualization residualize(const Matrix& X, std::span<const double> age,
                            std::span<const double> sex) {
    const std::size_t n = X.rows(), p = X.cols();
    if (age.size() != n || sex.size() != n)
        throw DataError("covariate length does not match matrix rows");
    if (n < 2) throw DataError("residualize needs at least 2 rows");

    Eigen::MatrixXd design(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        design(long(i), 0) = 1.0;
        design(long(i), 1) = age[i];
        design(long(i), 2) = sex[i];
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Xm(
        X.data(), long(n), long(p));

    Residualization out;
    out.coefficients = Matrix(p, 3);
    out.residuals = Matrix(n, p);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) {
        // Unidentifiable slopes (e.g. a constant covariate): intercept only.
        out.intercept_only = true;
        out.warnings.push_back(
            "rank-deficient covariate design; falling back to intercept-only residuals");
        for (std::size_t j = 0; j < p; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
            mean /= double(n);
            out.coefficients(j, 0) = mean;
            for (std::size_t i = 0; i < n; ++i) out.residuals(i, j) = X(i, j) - mean;
        }
        return out;
    }

    Eigen::MatrixXd beta = qr.solve(Xm);               // 3 x p
    Eigen::MatrixXd resid = Xm - design * beta;        // n x p
    for (std::size_t j = 0; j < p; ++j)
        for (int c = 0; c < 3; ++c) out.coefficients(j, std::size_t(c)) = beta(c, long(j));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) out.residuals(i, j) = resid(long(i), long(j));
    return out;
}

VoiceComponents pca_reduce(const Matrix& residuals, double var_threshold) {
    const std::size_t n = residuals.rows(), p = residuals.cols();
    if (n < 2) throw DataError("pca_reduce needs at least 2 rows");
    if (!(var_threshold > 0.0 && var_threshold < 1.0))
        throw ConfigError("variance threshold must be in (0, 1)");

    VoiceComponents out;
    out.column_means.resize(p);
    Eigen::MatrixXd centered(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += residuals(i, j);
        mean /= double(n);
        out.column_means[j] = mean;
        for (std::size_t i = 0; i < n; ++i) centered(long(i), long(j)) = residuals(i, j) - mean;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double total = sv.array().square().sum();
    if (total <= 0.0) throw DataError("pca_reduce: matrix has no variance");

    const std::size_t max_comp = std::size_t(sv.size());
    std::vector<double> ratios(max_comp);
    for (std::size_t c = 0; c < max_comp; ++c) ratios[c] = sv(long(c)) * sv(long(c)) / total;

    // Ratios are non-increasing, so retention is a prefix; it may be empty
    // when even the leading component falls below the threshold.
    std::size_t keep = 0;
    for (std::size_t c = 0; c < max_comp; ++c)
        if (ratios[c] >= var_threshold) keep = c + 1;

    Eigen::MatrixXd V = svd.matrixV().leftCols(long(keep));
    // Sign convention: the largest-magnitude entry of each loading is
    // positive, so repeated runs emit identical files.
    for (long c = 0; c < V.cols(); ++c) {
        long imax = 0;
        V.col(c).cwiseAbs().maxCoeff(&imax);
        if (V(imax, c) < 0) V.col(c) = -V.col(c);
    }
    Eigen::MatrixXd scores = centered * V;

    out.loadings = Matrix(p, keep);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t c = 0; c < keep; ++c) out.loadings(j, c) = V(long(j), long(c));
    out.explained_variance_ratio.assign(ratios.begin(), ratios.begin() + long(keep));
    out.scores = Matrix(n, keep);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < keep; ++c) out.scores(i, c) = scores(long(i), long(c));
    return out;
}

VoiceTable parse_voice_table(std::istream& in) {
    csv::Reader reader(in, {}, "voice.csv");
    const auto& header = reader.header();
    if (header.size() < 3 || header[0] != "participant_id" || header[1] != "date")
        throw SchemaError("voice.csv: header must start participant_id,date,<features...>");
    VoiceTable table;
    table.feature_names.assign(header.begin() + 2, header.end());

    std::vector<std::vector<double>> rows;
    while (auto row = reader.next()) {
        if (row->fields.size() != header.size())
            throw ParseError("voice.csv line " + std::to_string(row->line_number) +
                             ": expected " + std::to_string(header.size()) + " fields");
        table.participant_ids.push_back(row->fields[0]);
        table.dates.push_back(Date::parse(row->fields[1]));
        std::vector<double> values(table.feature_names.size());
        for (std::size_t j = 0; j < values.size(); ++j)
            values[j] = csv::parse_number(row->fields[j + 2], "voice.csv", row->line_number);
        rows.push_back(std::move(values));
    }
    table.values = Matrix(rows.size(), table.feature_names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < table.feature_names.size(); ++j)
            table.values(i, j) = rows[i][j];
    return table;
}

VoiceScores reduce_voice_table(const VoiceTable& table, const Demographics& demographics,
                               double var_threshold) {
    const std::size_t n = table.participant_ids.size();
    if (n < 2) throw DataError("voice table needs at least 2 rows");
    std::vector<double> age(n), sex(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& pid = table.participant_ids[i];
        auto a = demographics.age.find(pid);
        auto s = demographics.sex.find(pid);
        if (a == demographics.age.end() || s == demographics.sex.end())
            throw DataError("voice.csv participant '" + pid + "' missing from demographics.csv");
        age[i] = a->second;
        sex[i] = s->second;
    }

    Residualization res = residualize(table.values, age, sex);
    VoiceComponents comps = pca_reduce(res.residuals, var_threshold);
    comps.input_features = table.feature_names;
    comps.residual_coefficients = res.coefficients;
    comps.residual_intercept_only = res.intercept_only;

    // Average duplicate (participant, date) rows so the join key is unique.
    const std::size_t m = comps.scores.cols();
    std::map<std::pair<std::string, Date>, std::pair<std::vector<double>, std::size_t>> grouped;
    for (std::size_t i = 0; i < n; ++i) {
        auto& slot = grouped[{table.participant_ids[i], table.dates[i]}];
        if (slot.first.empty()) slot.first.assign(m, 0.0);
        for (std::size_t c = 0; c < m; ++c) slot.first[c] += comps.scores(i, c);
        slot.second += 1;
    }

    VoiceScores out;
    out.components = std::move(comps);
    for (std::size_t c = 0; c < m; ++c)
        out.component_names.push_back("voice_pc_" + std::to_string(c + 1));
    out.scores = Matrix(grouped.size(), m);
    std::size_t r = 0;
    for (const auto& [key, slot] : grouped) {
        out.participant_ids.push_back(key.first);
        out.dates.push_back(key.second);
        for (std::size_t c = 0; c < m; ++c)
            out.scores(r, c) = slot.first[c] / double(slot.second);
        ++r;
    }
    return out;
}

std::vector<ActigraphySample> parse_actigraphy(std::istream& in) {
    csv::Reader reader(in, {"participant_id", "timestamp", "activity_rate"}, "actigraphy.csv");
    std::vector<ActigraphySample> out;
    while (auto row = reader.next()) {
        if (row->fields.size() != 3)
            throw ParseError("actigraphy.csv line " + std::to_string(row->line_number) +
                             ": expected 3 fields");
        ActigraphySample s;
        s.participant_id = row->fields[0];
        DayTime dt = parse_timestamp(row->fields[1]);
        s.date = dt.date;
        s.seconds_of_day = dt.seconds_of_day;
        s.activity_rate = csv::parse_number(row->fields[2], "actigraphy.csv", row->line_number);
        if (s.activity_rate < 0)
            throw RangeError("actigraphy.csv line " + std::to_string(row->line_number) +
                             ": negative activity rate");
        out.push_back(std::move(s));
    }
    return out;
}

std::map<std::string, int> actigraphy_coverage(const std::vector<ActigraphySample>& samples) {
    std::map<std::string, std::set<Date>> days;
    for (const auto& s : samples) days[s.participant_id].insert(s.date);
    std::map<std::string, int> out;
    for (const auto& [pid, d] : days) out[pid] = int(d.size());
    return out;
}

std::vector<MobilityProfile> derive_zones(const std::vector<ActigraphySample>& samples,
                                          const ZoneConfig& config) {
    if (config.window_minutes < 1) throw ConfigError("window_minutes must be >= 1");
    for (std::size_t i = 1; i < config.thresholds.size(); ++i)
        if (!(config.thresholds[i - 1] < config.thresholds[i]))
            throw ConfigError("zone thresholds must be strictly increasing");

    struct WindowAcc {
        double sum = 0.0;
        std::size_t n = 0;
    };
    // (participant, shifted day, window index) -> accumulated rates
    std::map<std::tuple<std::string, Date, int>, WindowAcc> windows;
    const int window_seconds = config.window_minutes * 60;
    const int offset_seconds = config.day_offset_minutes * 60;
    for (const auto& s : samples) {
        long long t = (long long)s.seconds_of_day - offset_seconds;
        Date day = s.date;
        while (t < 0) {
            t += 86400;
            day = day.plus_days(-1);
        }
        while (t >= 86400) {
            t -= 86400;
            day = day.plus_days(1);
        }
        const int w = int(t / window_seconds);
        auto& acc = windows[{s.participant_id, day, w}];
        acc.sum += s.activity_rate;
        acc.n += 1;
    }

    auto zone_of = [&](double rate) {
        int z = 0;
        while (z < 4 && rate >= config.thresholds[std::size_t(z)]) ++z;
        return z;
    };

    std::map<std::pair<std::string, Date>, std::array<std::size_t, 5>> day_counts;
    for (const auto& [key, acc] : windows) {
        const double mean = acc.sum / double(acc.n);
        day_counts[{std::get<0>(key), std::get<1>(key)}][std::size_t(zone_of(mean))] += 1;
    }

    std::vector<MobilityProfile> out;
    out.reserve(day_counts.size());
    for (const auto& [key, counts] : day_counts) {
        MobilityProfile p;
        p.participant_id = key.first;
        p.date = key.second;
        const double total = double(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
        double em = 0.0;
        for (int z = 0; z < 5; ++z) {
            p.zone_fractions[std::size_t(z)] = double(counts[std::size_t(z)]) / total;
            em += (double(z) / 4.0) * p.zone_fractions[std::size_t(z)];
        }
        p.effective_mobility = em;
        out.push_back(std::move(p));
    }
    return out;
}

FeatureTable assemble_features(const CohortTable& cohort, const NormalizationParams& params,
                               const AssembleOptions& options,
                               const std::vector<MobilityProfile>* mobility,
                               const VoiceScores* voice, JoinMode mode,
                               AssembleSummary* summary) {
    if (options.use_mobility && !mobility)
        throw ConfigError("mobility modality enabled but no mobility profiles given");
    if (options.use_voice && !voice)
        throw ConfigError("voice modality enabled but no voice scores given");

    std::map<std::pair<std::string, Date>, double> em;
    if (options.use_mobility)
        for (const auto& p : *mobility) em[{p.participant_id, p.date}] = p.effective_mobility;
    std::map<std::pair<std::string, Date>, std::size_t> voice_rows;
    if (options.use_voice)
        for (std::size_t i = 0; i < voice->participant_ids.size(); ++i)
            voice_rows[{voice->participant_ids[i], voice->dates[i]}] = i;

    FeatureTable table;
    table.feature_names.assign(kCompositeNames.begin(), kCompositeNames.end());
    if (options.use_mobility) table.feature_names.push_back("effective_mobility");
    if (options.use_voice)
        table.feature_names.insert(table.feature_names.end(), voice->component_names.begin(),
                                   voice->component_names.end());

    std::vector<std::vector<double>> rows;
    AssembleSummary local;
    for (const auto& rec : cohort.records) {
        ++local.questionnaire_days;
        const auto key = std::make_pair(rec.participant_id, rec.date);
        const auto em_it = em.find(key);
        const auto voice_it = voice_rows.find(key);
        const bool have_mob = !options.use_mobility || em_it != em.end();
        const bool have_voice = !options.use_voice || voice_it != voice_rows.end();
        if (mode == JoinMode::inner && !(have_mob && have_voice)) continue;

        const auto composites = compose(params.apply(rec), cohort.registry, options.compose);
        std::vector<double> row;
        row.reserve(table.feature_names.size());
        for (const char* name : kCompositeNames) row.push_back(composites.at(name));
        if (options.use_mobility) {
            if (em_it != em.end()) {
                row.push_back(em_it->second);
                ++local.mobility_days_matched;
            } else {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        if (options.use_voice) {
            if (voice_it != voice_rows.end()) {
                for (std::size_t c = 0; c < voice->scores.cols(); ++c)
                    row.push_back(voice->scores(voice_it->second, c));
                ++local.voice_days_matched;
            } else {
                for (std::size_t c = 0; c < voice->scores.cols(); ++c)
                    row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        table.participant_ids.push_back(rec.participant_id);
        table.dates.push_back(rec.date);
        rows.push_back(std::move(row));
    }

    table.values = Matrix(rows.size(), table.feature_names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < table.feature_names.size(); ++j)
            table.values(i, j) = rows[i][j];
    local.rows = rows.size();
    if (summary) *summary = local;
    return table;
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
    std::vector<std::string> header = {"participant_id", "date"};
    header.insert(header.end(), table.feature_names.begin(), table.feature_names.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < table.size(); ++i) {
        std::vector<std::string> fields = {table.participant_ids[i], table.dates[i].to_string()};
        for (std::size_t j = 0; j < table.feature_names.size(); ++j) {
            const double v = table.values(i, j);
            fields.push_back(std::isnan(v) ? std::string() : fmt_double(v));
        }
        csv::write_row(out, fields);
    }
}

FeatureTable read_feature_table(std::istream& in) {
    csv::Reader reader(in, {}, "features.csv");
    const auto& header = reader.header();
    if (header.size() < 3 || header[0] != "participant_id" || header[1] != "date")
        throw SchemaError("features.csv: header must start participant_id,date");
    FeatureTable table;
    table.feature_names.assign(header.begin() + 2, header.end());
    std::vector<std::vector<double>> rows;
    while (auto row = reader.next()) {
        if (row->fields.size() != header.size())
            throw ParseError("features.csv line " + std::to_string(row->line_number) +
                             ": expected " + std::to_string(header.size()) + " fields");
        table.participant_ids.push_back(row->fields[0]);
        table.dates.push_back(Date::parse(row->fields[1]));
        std::vector<double> values(table.feature_names.size());
        for (std::size_t j = 0; j < values.size(); ++j) {
            const std::string& f = row->fields[j + 2];
            values[j] = f.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : csv::parse_number(f, "features.csv", row->line_number);
        }
        rows.push_back(std::move(values));
    }
    table.values = Matrix(rows.size(), table.feature_names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < table.feature_names.size(); ++j)
            table.values(i, j) = rows[i][j];
    return table;
}

FeatureTable select_features(const FeatureTable& table, const std::vector<std::string>& names) {
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        auto it = std::find(table.feature_names.begin(), table.feature_names.end(), name);
        if (it == table.feature_names.end())
            throw SchemaError("feature '" + name + "' not present in table");
        cols.push_back(std::size_t(it - table.feature_names.begin()));
    }
    FeatureTable out;
    out.feature_names = names;
    std::vector<std::size_t> keep_rows;
    for (std::size_t i = 0; i < table.size(); ++i) {
        bool complete = true;
        for (std::size_t c : cols)
            if (std::isnan(table.values(i, c))) complete = false;
        if (complete) keep_rows.push_back(i);
    }
    out.values = Matrix(keep_rows.size(), cols.size());
    for (std::size_t r = 0; r < keep_rows.size(); ++r) {
        out.participant_ids.push_back(table.participant_ids[keep_rows[r]]);
        out.dates.push_back(table.dates[keep_rows[r]]);
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.values(r, c) = table.values(keep_rows[r], cols[c]);
    }
    return out;
}

}  // namespace painstates
