#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "painstates/model.hpp"

namespace painstates {

struct StateTimecourse {
    struct Entry {
        Date date;
        int state = 0;  // centroid index
        std::vector<double> distances;
    };
    std::string participant_id;
    std::vector<Entry> entries;  // sorted by date, unique per date
};

/// Labels each day with its nearest centroid; exact distance ties go to the
/// better-ranked state. The model must carry ordinal labels.
std::vector<StateTimecourse> assign_states(const ClusterModel& model, const FeatureTable& table);

struct DwellContrast {
    std::string participant_id;
    Date event_date;
    int pre_days = 0, post_days = 0;
    std::vector<double> pre_fractions, post_fractions, delta;  // per state index
    std::size_t pre_count = 0, post_count = 0;  // assigned days in each window
    bool has_pre = false, has_post = false;
};

/// Dwell fractions over [event - pre_days, event) and (event, event +
/// post_days]; the event day itself belongs to neither. Empty windows leave
/// the contrast flagged (has_pre/has_post false) with zero fractions.
DwellContrast dwell_contrast(const StateTimecourse& timecourse, int k, Date event_date,
                             int pre_days = 30, int post_days = 30);

struct EventRecord {
    std::string participant_id;
    Date date;
    std::string event_type;
};

// `events.csv`: participant_id,date,event_type
std::vector<EventRecord> parse_events(std::istream& in);

// `assignments.csv`: participant_id,date,state_label,dist_1..dist_k
void write_assignments(std::ostream& out, const std::vector<StateTimecourse>& timecourses,
                       const ClusterModel& model);
std::vector<StateTimecourse> read_assignments(std::istream& in, const ClusterModel& model);

struct ExportOptions {
    int pre_days = 30;
    int post_days = 30;
};

struct ExportResult {
    std::vector<std::string> svg_paths;
    std::vector<DwellContrast> contrasts;
};

/// Emits one `<participant_id>_timecourse.svg` per patient (state band on
/// top, feature traces below, dwell bars when the patient has an event) plus
/// `dwell_contrasts.csv` when any events exist. `raw_features` supplies the
/// traces and may include rows for days without assignments.
ExportResult export_timecourse(const std::vector<StateTimecourse>& timecourses,
                               const FeatureTable& raw_features, const ClusterModel& model,
                               const std::vector<EventRecord>& events,
                               const std::string& out_dir, const ExportOptions& options = {});

}  // namespace painstates
