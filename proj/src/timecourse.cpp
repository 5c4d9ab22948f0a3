#include "painstates/timecourse.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "painstates/csv.hpp"

namespace painstates {

std::vector<StateTimecourse> assign_states(const ClusterModel& model, const FeatureTable& table) {
    model.check();
    if (!model.has_ranking())
        throw DataError("assign_states requires a ranked model (run validation first)");
    if (table.feature_names != model.feature_names)
        throw DataError("feature table columns do not match model feature space");

    // Rank position per state for the tie rule (0 = best).
    std::vector<std::size_t> rank_of(std::size_t(model.k));
    {
        const auto by_rank = model.states_by_rank();
        for (std::size_t r = 0; r < by_rank.size(); ++r) rank_of[by_rank[r]] = r;
    }

    std::map<std::string, StateTimecourse> grouped;
    for (std::size_t i = 0; i < table.size(); ++i) {
        StateTimecourse::Entry entry;
        entry.date = table.dates[i];
        entry.distances = centroid_distances(model, table.values.row(i));
        int best = 0;
        for (int s = 1; s < model.k; ++s) {
            const double d = entry.distances[std::size_t(s)];
            const double bd = entry.distances[std::size_t(best)];
            if (d < bd || (d == bd && rank_of[std::size_t(s)] < rank_of[std::size_t(best)]))
                best = s;
        }
        entry.state = best;
        auto& tc = grouped[table.participant_ids[i]];
        tc.participant_id = table.participant_ids[i];
        tc.entries.push_back(std::move(entry));
    }

    std::vector<StateTimecourse> out;
    for (auto& [pid, tc] : grouped) {
        std::sort(tc.entries.begin(), tc.entries.end(),
                  [](const auto& a, const auto& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < tc.entries.size(); ++i)
            if (tc.entries[i].date == tc.entries[i - 1].date)
                throw DataError("duplicate feature row for " + pid + " on " +
                                tc.entries[i].date.to_string());
        out.push_back(std::move(tc));
    }
    return out;
}

DwellContrast dwell_contrast(const StateTimecourse& timecourse, int k, Date event_date,
                             int pre_days, int post_days) {
    if (pre_days < 1 || post_days < 1) throw ConfigError("dwell windows must be >= 1 day");
    DwellContrast out;
    out.participant_id = timecourse.participant_id;
    out.event_date = event_date;
    out.pre_days = pre_days;
    out.post_days = post_days;
    out.pre_fractions.assign(std::size_t(k), 0.0);
    out.post_fractions.assign(std::size_t(k), 0.0);
    out.delta.assign(std::size_t(k), 0.0);

    for (const auto& entry : timecourse.entries) {
        const int offset = entry.date.days_since(event_date);
        if (offset >= -pre_days && offset < 0) {
            out.pre_fractions[std::size_t(entry.state)] += 1.0;
            ++out.pre_count;
        } else if (offset > 0 && offset <= post_days) {
            out.post_fractions[std::size_t(entry.state)] += 1.0;
            ++out.post_count;
        }
        // offset == 0 is the event day itself: ambiguous, excluded.
    }
    out.has_pre = out.pre_count > 0;
    out.has_post = out.post_count > 0;
    if (out.has_pre)
        for (auto& f : out.pre_fractions) f /= double(out.pre_count);
    if (out.has_post)
        for (auto& f : out.post_fractions) f /= double(out.post_count);
    for (std::size_t s = 0; s < std::size_t(k); ++s)
        out.delta[s] = out.post_fractions[s] - out.pre_fractions[s];
    return out;
}

std::vector<EventRecord> parse_events(std::istream& in) {
    csv::Reader reader(in, {"participant_id", "date", "event_type"}, "events.csv");
    std::vector<EventRecord> out;
    while (auto row = reader.next()) {
        if (row->fields.size() != 3)
            throw ParseError("events.csv line " + std::to_string(row->line_number) +
                             ": expected 3 fields");
        out.push_back({row->fields[0], Date::parse(row->fields[1]), row->fields[2]});
    }
    return out;
}

void write_assignments(std::ostream& out, const std::vector<StateTimecourse>& timecourses,
                       const ClusterModel& model) {
    std::vector<std::string> header = {"participant_id", "date", "state_label"};
    for (int s = 1; s <= model.k; ++s) header.push_back("dist_" + std::to_string(s));
    csv::write_row(out, header);
    for (const auto& tc : timecourses) {
        for (const auto& entry : tc.entries) {
            std::vector<std::string> fields = {tc.participant_id, entry.date.to_string(),
                                               model.ranking[std::size_t(entry.state)]};
            for (double d : entry.distances) fields.push_back(fmt_double(d));
            csv::write_row(out, fields);
        }
    }
}

std::vector<StateTimecourse> read_assignments(std::istream& in, const ClusterModel& model) {
    std::vector<std::string> header = {"participant_id", "date", "state_label"};
    for (int s = 1; s <= model.k; ++s) header.push_back("dist_" + std::to_string(s));
    csv::Reader reader(in, header, "assignments.csv");
    std::map<std::string, StateTimecourse> grouped;
    while (auto row = reader.next()) {
        if (row->fields.size() != header.size())
            throw ParseError("assignments.csv line " + std::to_string(row->line_number) +
                             ": wrong field count");
        StateTimecourse::Entry entry;
        entry.date = Date::parse(row->fields[1]);
        entry.state = int(model.state_of_label(row->fields[2]));
        for (int s = 0; s < model.k; ++s)
            entry.distances.push_back(
                csv::parse_number(row->fields[std::size_t(3 + s)], "assignments.csv",
                                  row->line_number));
        auto& tc = grouped[row->fields[0]];
        tc.participant_id = row->fields[0];
        tc.entries.push_back(std::move(entry));
    }
    std::vector<StateTimecourse> out;
    for (auto& [pid, tc] : grouped) {
        std::sort(tc.entries.begin(), tc.entries.end(),
                  [](const auto& a, const auto& b) { return a.date < b.date; });
        out.push_back(std::move(tc));
    }
    return out;
}

namespace {

// Fixed palette, best state first.
const char* kStateColors[] = {"#2e7d32", "#7cb342", "#fdd835", "#fb8c00", "#d32f2f",
                              "#8e24aa", "#3949ab", "#00897b", "#6d4c41", "#546e7a"};

std::string state_color(std::size_t rank) {
    return kStateColors[rank % (sizeof(kStateColors) / sizeof(kStateColors[0]))];
}

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

ExportResult export_timecourse(const std::vector<StateTimecourse>& timecourses,
                               const FeatureTable& raw_features, const ClusterModel& model,
                               const std::vector<EventRecord>& events,
                               const std::string& out_dir, const ExportOptions& options) {
    namespace fs = std::filesystem;
    ExportResult result;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create directory " + out_dir + ": " + ec.message());

    std::map<std::string, Date> event_dates;
    for (const auto& e : events) event_dates.emplace(e.participant_id, e.date);

    // Feature rows per participant for the trace panel.
    std::map<std::string, std::vector<std::size_t>> feature_rows;
    for (std::size_t i = 0; i < raw_features.size(); ++i)
        feature_rows[raw_features.participant_ids[i]].push_back(i);

    std::vector<std::size_t> rank_of(std::size_t(model.k));
    const auto by_rank = model.states_by_rank();
    for (std::size_t r = 0; r < by_rank.size(); ++r) rank_of[by_rank[r]] = r;

    for (const auto& tc : timecourses) {
        if (tc.entries.empty()) continue;
        const Date first = tc.entries.front().date;
        const Date last = tc.entries.back().date;
        const int span = last.days_since(first) + 1;

        const double width = 900.0, band_h = 40.0, trace_h = 220.0, bar_h = 160.0;
        const double margin = 50.0;
        const double plot_w = width - 2 * margin;
        const double cell_w = plot_w / double(span);
        const auto event_it = event_dates.find(tc.participant_id);
        const bool has_event = event_it != event_dates.end();
        const double height = margin + band_h + 20 + trace_h + (has_event ? bar_h + 40 : 0) + 60;

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
        svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
            << tc.participant_id << " state timecourse (" << first.to_string() << " to "
            << last.to_string() << ")</text>\n";

        // State band: one cell per assigned day.
        const double band_y = margin;
        for (const auto& entry : tc.entries) {
            const double x = margin + cell_w * double(entry.date.days_since(first));
            svg << "<rect class=\"state-cell\" x=\"" << svg_num(x) << "\" y=\"" << band_y
                << "\" width=\"" << svg_num(std::max(cell_w, 0.5)) << "\" height=\"" << band_h
                << "\" fill=\"" << state_color(rank_of[std::size_t(entry.state)]) << "\"><title>"
                << entry.date.to_string() << " " << model.ranking[std::size_t(entry.state)]
                << "</title></rect>\n";
        }
        // Legend, best to worst.
        for (std::size_t r = 0; r < by_rank.size(); ++r) {
            const double lx = margin + double(r) * 60.0;
            svg << "<rect x=\"" << lx << "\" y=\"" << band_y + band_h + 4 << "\" width=\"10\" "
                << "height=\"10\" fill=\"" << state_color(r) << "\"/>\n";
            svg << "<text x=\"" << lx + 14 << "\" y=\"" << band_y + band_h + 13
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << ordinal_label(r)
                << "</text>\n";
        }

        // Feature traces below the band.
        const double trace_y = band_y + band_h + 30;
        auto rows_it = feature_rows.find(tc.participant_id);
        if (rows_it != feature_rows.end()) {
            double lo = 0.0, hi = 1.0;
            for (std::size_t r : rows_it->second)
                for (std::size_t c = 0; c < raw_features.feature_names.size(); ++c) {
                    const double v = raw_features.values(r, c);
                    if (std::isnan(v)) continue;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            if (hi <= lo) hi = lo + 1.0;
            for (std::size_t c = 0; c < raw_features.feature_names.size(); ++c) {
                std::ostringstream points;
                bool any = false;
                for (std::size_t r : rows_it->second) {
                    const double v = raw_features.values(r, c);
                    if (std::isnan(v)) continue;
                    const double x =
                        margin + cell_w * double(raw_features.dates[r].days_since(first));
                    const double y = trace_y + trace_h * (1.0 - (v - lo) / (hi - lo));
                    points << (any ? " " : "") << svg_num(x) << "," << svg_num(y);
                    any = true;
                }
                if (!any) continue;
                svg << "<polyline class=\"feature-trace\" fill=\"none\" stroke=\""
                    << state_color(c) << "\" stroke-width=\"0.8\" opacity=\"0.7\" points=\""
                    << points.str() << "\"><title>" << raw_features.feature_names[c]
                    << "</title></polyline>\n";
            }
        }

        // Dwell bars around the event.
        if (has_event) {
            const DwellContrast dc = dwell_contrast(tc, model.k, event_it->second,
                                                    options.pre_days, options.post_days);
            result.contrasts.push_back(dc);
            const double bar_y = trace_y + trace_h + 40;
            const double group_w = plot_w / double(model.k);
            svg << "<text x=\"" << margin << "\" y=\"" << bar_y - 8
                << "\" font-family=\"sans-serif\" font-size=\"12\">dwell fraction "
                << options.pre_days << "d before (grey) / " << options.post_days
                << "d after (colored) event " << event_it->second.to_string() << "</text>\n";
            for (std::size_t r = 0; r < by_rank.size(); ++r) {
                const std::size_t s = by_rank[r];
                const double gx = margin + group_w * double(r);
                const double wpre = group_w * 0.35, wpost = group_w * 0.35;
                const double hpre = bar_h * dc.pre_fractions[s];
                const double hpost = bar_h * dc.post_fractions[s];
                svg << "<rect class=\"dwell-pre\" x=\"" << svg_num(gx) << "\" y=\""
                    << svg_num(bar_y + bar_h - hpre) << "\" width=\"" << svg_num(wpre)
                    << "\" height=\"" << svg_num(hpre) << "\" fill=\"#9e9e9e\"/>\n";
                svg << "<rect class=\"dwell-post\" x=\"" << svg_num(gx + wpre + 2) << "\" y=\""
                    << svg_num(bar_y + bar_h - hpost) << "\" width=\"" << svg_num(wpost)
                    << "\" height=\"" << svg_num(hpost) << "\" fill=\"" << state_color(r)
                    << "\"/>\n";
                svg << "<text x=\"" << svg_num(gx + group_w * 0.3) << "\" y=\""
                    << svg_num(bar_y + bar_h + 14)
                    << "\" font-family=\"sans-serif\" font-size=\"11\">" << ordinal_label(r)
                    << "</text>\n";
            }
        }
        svg << "</svg>\n";

        const std::string path =
            (fs::path(out_dir) / (tc.participant_id + "_timecourse.svg")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path);
        out << svg.str();
        if (!out) throw Error("write failed: " + path);
        result.svg_paths.push_back(path);
    }
    return result;
}

}  // namespace painstates
