#ifndef HAZARDLAB_EVENTS_HPP
#define HAZARDLAB_EVENTS_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hazardlab {

enum class Algorithm { gamma, echo };

enum class EventKind { trial_start, pick, place, trust, latency, trial_end };

struct TrialStart {
    int trial = 0;
    Algorithm algorithm = Algorithm::gamma;
};
struct Pick {
    int grasp = 0;
};
struct Place {
    int grasp = 0;
    bool success = false;
};
struct Trust {
    double value = 0.0; // slider units, 0..100
};
struct LatencyProbe {
    double rtt_ms = 0.0;
};
struct TrialEnd {
    int trial = 0;
};

struct EventRecord {
    double t = 0.0; // seconds on the client clock
    std::string subject;
    EventKind kind = EventKind::trial_start;
    std::variant<TrialStart, Pick, Place, Trust, LatencyProbe, TrialEnd> payload;
};

/// Events grouped by subject; within a subject, ordered by time.
struct EventLog {
    std::map<std::string, std::vector<EventRecord>> by_subject;

    std::size_t total_events() const;
    std::vector<std::string> subjects() const;
};

/// One gripper-close-to-next-gripper-close window. Times are seconds since
/// the pick, which is the episode origin.
struct GraspEpisode {
    std::string subject;
    int trial = 0;
    int grasp_number = 0;
    bool is_final = false;
    Algorithm algorithm = Algorithm::gamma;
    double t_pick = 0.0; // absolute log time of the pick
    double t_place = 0.0;
    bool success = false;
    double trust_at_pick = 50.0;
    double horizon = 0.0;
    std::vector<std::pair<double, double>> ratings; // (time since pick, slider value)
    std::optional<double> tRT;
    std::optional<double> trust_change;
};

struct SegmentationResult {
    std::vector<GraspEpisode> episodes;
    int dropped_picks = 0;
    std::vector<std::string> warnings;
};

struct ExclusionRules {
    double latency_ms = 300.0;
    double trial_duration_factor = 3.0;
    bool require_complete = true;
    int expected_trials = 10;
    int grasps_per_trial = 4;
};

enum class ExclusionReason { incomplete, long_trials, high_latency };

struct ExclusionReport {
    std::vector<std::string> included;
    std::vector<std::pair<std::string, ExclusionReason>> excluded;
};

const char* to_string(Algorithm a);
const char* to_string(EventKind k);
const char* to_string(ExclusionReason r);

/// Parse line-delimited records (one JSON object per line). The whole
/// stream is rejected on the first malformed line, with its line number.
EventLog parse_event_log(std::istream& in);

/// Shift every non-latency event earlier by half the rolling-median RTT of
/// the `window` probes nearest in time. Latency probes stay put. Subjects
/// without probes pass through with a warning.
EventLog correct_latency(const EventLog& log, int window,
                         std::vector<std::string>* warnings = nullptr);

/// Median RTT (ms) over all of one subject's probes.
double median_rtt(const EventLog& log, const std::string& subject);

/// Cut the log into grasp episodes. Picks without a matching place before
/// the next pick are dropped and counted.
SegmentationResult segment_grasps(const EventLog& log);

ExclusionReport apply_exclusions(const EventLog& log, const ExclusionRules& rules);

/// Keep only the report's included subjects.
EventLog filter_included(const EventLog& log, const ExclusionReport& report);

void write_event_log(std::ostream& out, const EventLog& log);
void write_episode_csv(std::ostream& out, const std::vector<GraspEpisode>& episodes);
void write_exclusion_csv(std::ostream& out, const ExclusionReport& report);

} // namespace hazardlab

#endif
