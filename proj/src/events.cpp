#include "hazardlab/events.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"
#include "hazardlab/stats.hpp"

namespace hazardlab {

using nlohmann::json;

std::size_t EventLog::total_events() const {
    std::size_t n = 0;
    for (const auto& [subject, events] : by_subject) n += events.size();
    return n;
}

std::vector<std::string> EventLog::subjects() const {
    std::vector<std::string> out;
    out.reserve(by_subject.size());
    for (const auto& [subject, events] : by_subject) out.push_back(subject);
    return out;
}

const char* to_string(Algorithm a) {
    return a == Algorithm::gamma ? "gamma" : "echo";
}

const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::trial_start: return "trial_start";
    case EventKind::pick: return "pick";
    case EventKind::place: return "place";
    case EventKind::trust: return "trust";
    case EventKind::latency: return "latency";
    case EventKind::trial_end: return "trial_end";
    }
    return "?";
}

const char* to_string(ExclusionReason r) {
    switch (r) {
    case ExclusionReason::incomplete: return "incomplete";
    case ExclusionReason::long_trials: return "long_trials";
    case ExclusionReason::high_latency: return "high_latency";
    }
    return "?";
}

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw DataError("event log line " + std::to_string(line_no) + ": " + what);
}

double require_number(const json& j, const char* field, std::size_t line_no) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number()) {
        fail_line(line_no, std::string("missing or non-numeric field '") + field + "'");
    }
    return it->get<double>();
}

int require_int(const json& j, const char* field, std::size_t line_no) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number_integer()) {
        fail_line(line_no, std::string("missing or non-integer field '") + field + "'");
    }
    return it->get<int>();
}

Algorithm parse_algorithm(const json& j, std::size_t line_no) {
    auto it = j.find("algorithm");
    if (it == j.end() || !it->is_string()) fail_line(line_no, "missing field 'algorithm'");
    const std::string s = it->get<std::string>();
    if (s == "gamma") return Algorithm::gamma;
    if (s == "echo") return Algorithm::echo;
    fail_line(line_no, "unknown algorithm '" + s + "'");
}

EventRecord parse_record(const std::string& line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        fail_line(line_no, std::string("malformed record: ") + e.what());
    }
    if (!j.is_object()) fail_line(line_no, "record is not an object");

    EventRecord rec;
    rec.t = require_number(j, "t", line_no);
    auto subject_it = j.find("subject");
    if (subject_it == j.end() || !subject_it->is_string()) {
        fail_line(line_no, "missing field 'subject'");
    }
    rec.subject = subject_it->get<std::string>();
    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string()) fail_line(line_no, "missing field 'kind'");
    const std::string kind = kind_it->get<std::string>();

    if (kind == "trial_start") {
        rec.kind = EventKind::trial_start;
        TrialStart p;
        p.trial = require_int(j, "trial", line_no);
        p.algorithm = parse_algorithm(j, line_no);
        rec.payload = p;
    } else if (kind == "pick") {
        rec.kind = EventKind::pick;
        Pick p;
        p.grasp = require_int(j, "grasp", line_no);
        if (p.grasp < 1) fail_line(line_no, "grasp index must be >= 1");
        rec.payload = p;
    } else if (kind == "place") {
        rec.kind = EventKind::place;
        Place p;
        p.grasp = require_int(j, "grasp", line_no);
        auto it = j.find("success");
        if (it == j.end() || !it->is_boolean()) fail_line(line_no, "missing field 'success'");
        p.success = it->get<bool>();
        rec.payload = p;
    } else if (kind == "trust") {
        rec.kind = EventKind::trust;
        Trust p;
        p.value = require_number(j, "value", line_no);
        if (p.value < 0.0 || p.value > 100.0) fail_line(line_no, "trust out of range [0,100]");
        rec.payload = p;
    } else if (kind == "latency") {
        rec.kind = EventKind::latency;
        LatencyProbe p;
        p.rtt_ms = require_number(j, "rtt_ms", line_no);
        if (p.rtt_ms < 0.0) fail_line(line_no, "negative rtt_ms");
        rec.payload = p;
    } else if (kind == "trial_end") {
        rec.kind = EventKind::trial_end;
        TrialEnd p;
        p.trial = require_int(j, "trial", line_no);
        rec.payload = p;
    } else {
        fail_line(line_no, "unknown event kind '" + kind + "'");
    }
    return rec;
}

} // namespace

EventLog parse_event_log(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        EventRecord rec = parse_record(line, line_no);
        auto& events = log.by_subject[rec.subject];
        if (!events.empty() && rec.t < events.back().t) {
            fail_line(line_no, "non-monotone timestamp for subject '" + rec.subject + "'");
        }
        events.push_back(std::move(rec));
    }
    return log;
}

namespace {

double window_median(const std::vector<std::pair<double, double>>& probes, std::size_t center,
                     int window) {
    const int half = (window - 1) / 2;
    const auto n = static_cast<long>(probes.size());
    long lo = static_cast<long>(center) - half;
    long hi = static_cast<long>(center) + half;
    lo = std::max(lo, 0L);
    hi = std::min(hi, n - 1);
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) vals.push_back(probes[static_cast<std::size_t>(i)].second);
    return stats::median(std::move(vals));
}

std::size_t nearest_probe(const std::vector<std::pair<double, double>>& probes, double t) {
    const auto it = std::lower_bound(
        probes.begin(), probes.end(), t,
        [](const std::pair<double, double>& p, double v) { return p.first < v; });
    if (it == probes.begin()) return 0;
    if (it == probes.end()) return probes.size() - 1;
    const std::size_t after = static_cast<std::size_t>(it - probes.begin());
    const std::size_t before = after - 1;
    // Ties go to the earlier probe.
    if (t - probes[before].first <= probes[after].first - t) return before;
    return after;
}

} // namespace

EventLog correct_latency(const EventLog& log, int window, std::vector<std::string>* warnings) {
    if (window < 1 || window % 2 == 0) {
        throw ConfigError("latency window must be a positive odd integer");
    }
    EventLog out;
    for (const auto& [subject, events] : log.by_subject) {
        std::vector<std::pair<double, double>> probes;
        for (const EventRecord& ev : events) {
            if (ev.kind == EventKind::latency) {
                const double rtt = std::get<LatencyProbe>(ev.payload).rtt_ms;
                if (rtt < 0.0) throw DataError("negative rtt for subject '" + subject + "'");
                probes.emplace_back(ev.t, rtt);
            }
        }
        std::vector<EventRecord> corrected = events;
        if (probes.empty()) {
            if (warnings) {
                warnings->push_back("subject '" + subject +
                                    "' has no latency probes; timestamps left unchanged");
            }
        } else {
            for (EventRecord& ev : corrected) {
                if (ev.kind == EventKind::latency) continue;
                const double med = window_median(probes, nearest_probe(probes, ev.t), window);
                ev.t -= med / 2000.0; // half the RTT, ms -> s
            }
            std::stable_sort(corrected.begin(), corrected.end(),
                             [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
        }
        out.by_subject.emplace(subject, std::move(corrected));
    }
    return out;
}

double median_rtt(const EventLog& log, const std::string& subject) {
    const auto it = log.by_subject.find(subject);
    if (it == log.by_subject.end()) throw DataError("unknown subject '" + subject + "'");
    std::vector<double> rtts;
    for (const EventRecord& ev : it->second) {
        if (ev.kind == EventKind::latency) rtts.push_back(std::get<LatencyProbe>(ev.payload).rtt_ms);
    }
    if (rtts.empty()) throw DataError("subject '" + subject + "' has no latency probes");
    return stats::median(std::move(rtts));
}

namespace {

struct TrialSpan {
    int trial = 0;
    Algorithm algorithm = Algorithm::gamma;
    std::size_t begin = 0; // index of the trial_start event
    std::size_t end = 0;   // one past the last event of the trial
    double last_event_t = 0.0;
};

// A trial spans its trial_start up to its trial_end when present; events
// after the trial_end but before the next trial_start belong to no trial.
std::vector<TrialSpan> trial_spans(const std::vector<EventRecord>& events) {
    std::vector<TrialSpan> spans;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].kind != EventKind::trial_start) continue;
        TrialSpan span;
        span.trial = std::get<TrialStart>(events[i].payload).trial;
        span.algorithm = std::get<TrialStart>(events[i].payload).algorithm;
        span.begin = i;
        std::size_t j = i + 1;
        bool ended = false;
        for (; j < events.size(); ++j) {
            if (events[j].kind == EventKind::trial_start) break;
            if (events[j].kind == EventKind::trial_end) {
                ended = true;
                ++j;
                break;
            }
        }
        span.end = j;
        span.last_event_t = events[span.end - 1].t;
        (void)ended;
        spans.push_back(span);
    }
    return spans;
}

} // namespace

SegmentationResult segment_grasps(const EventLog& log) {
    SegmentationResult result;
    for (const auto& [subject, events] : log.by_subject) {
        // Trust history across the whole session: the slider keeps its
        // position between trials.
        std::vector<std::pair<double, double>> trust_events;
        for (const EventRecord& ev : events) {
            if (ev.kind == EventKind::trust) {
                trust_events.emplace_back(ev.t, std::get<Trust>(ev.payload).value);
            }
        }

        std::size_t total_picks = 0;
        for (const EventRecord& ev : events) {
            if (ev.kind == EventKind::pick) ++total_picks;
        }

        std::size_t seen_picks = 0;
        for (const TrialSpan& span : trial_spans(events)) {
            std::vector<std::size_t> picks;
            for (std::size_t i = span.begin; i < span.end; ++i) {
                if (events[i].kind == EventKind::pick) picks.push_back(i);
            }
            seen_picks += picks.size();

            for (std::size_t pi = 0; pi < picks.size(); ++pi) {
                const std::size_t pick_idx = picks[pi];
                const EventRecord& pick_ev = events[pick_idx];
                const double t_pick = pick_ev.t;
                const bool last_in_trial = pi + 1 == picks.size();
                const std::size_t next_limit = last_in_trial ? span.end : picks[pi + 1];

                const Place* place = nullptr;
                double t_place_abs = 0.0;
                for (std::size_t i = pick_idx + 1; i < next_limit; ++i) {
                    if (events[i].kind == EventKind::place) {
                        place = &std::get<Place>(events[i].payload);
                        t_place_abs = events[i].t;
                        break;
                    }
                }
                if (place == nullptr) {
                    ++result.dropped_picks;
                    result.warnings.push_back("subject '" + subject + "' trial " +
                                              std::to_string(span.trial) + ": pick without place");
                    continue;
                }

                GraspEpisode ep;
                ep.subject = subject;
                ep.trial = span.trial;
                ep.grasp_number = std::get<Pick>(pick_ev.payload).grasp;
                ep.is_final = last_in_trial;
                ep.algorithm = span.algorithm;
                ep.t_pick = t_pick;
                ep.t_place = t_place_abs - t_pick;
                ep.success = place->success;
                ep.horizon = last_in_trial ? span.last_event_t - t_pick
                                           : events[picks[pi + 1]].t - t_pick;
                if (!(ep.t_place > 0.0 && ep.t_place < ep.horizon)) {
                    ++result.dropped_picks;
                    result.warnings.push_back("subject '" + subject + "' trial " +
                                              std::to_string(span.trial) +
                                              ": placement outside (0, horizon)");
                    continue;
                }

                // Last slider value strictly before the pick; 50 if untouched.
                ep.trust_at_pick = 50.0;
                auto before = std::lower_bound(
                    trust_events.begin(), trust_events.end(), t_pick,
                    [](const std::pair<double, double>& p, double v) { return p.first < v; });
                if (before != trust_events.begin()) ep.trust_at_pick = (before - 1)->second;

                // Ratings inside [0, horizon], closed at the right end.
                auto first_rating = std::lower_bound(
                    trust_events.begin(), trust_events.end(), t_pick,
                    [](const std::pair<double, double>& p, double v) { return p.first < v; });
                for (auto it = first_rating;
                     it != trust_events.end() && it->first - t_pick <= ep.horizon; ++it) {
                    ep.ratings.emplace_back(it->first - t_pick, it->second);
                }
                if (!ep.ratings.empty()) {
                    ep.tRT = ep.ratings.back().first;
                    ep.trust_change = ep.ratings.back().second - ep.trust_at_pick;
                }
                result.episodes.push_back(std::move(ep));
            }
        }
        const std::size_t orphan_picks = total_picks - seen_picks;
        if (orphan_picks > 0) {
            result.dropped_picks += static_cast<int>(orphan_picks);
            result.warnings.push_back("subject '" + subject + "': " +
                                      std::to_string(orphan_picks) +
                                      " pick(s) outside any trial");
        }
    }
    return result;
}

ExclusionReport apply_exclusions(const EventLog& log, const ExclusionRules& rules) {
    if (log.by_subject.empty()) throw DataError("exclusion rules applied to an empty log");
    if (!(rules.trial_duration_factor > 0.0)) {
        throw ConfigError("trial_duration_factor must be > 0");
    }

    // Episode counts per subject.
    std::map<std::string, int> episode_count;
    const SegmentationResult seg = segment_grasps(log);
    for (const GraspEpisode& ep : seg.episodes) episode_count[ep.subject]++;

    // Trial durations pooled across subjects.
    std::vector<double> all_durations;
    std::map<std::string, double> max_duration;
    for (const auto& [subject, events] : log.by_subject) {
        for (const TrialSpan& span : trial_spans(events)) {
            const double duration = span.last_event_t - events[span.begin].t;
            all_durations.push_back(duration);
            auto [it, inserted] = max_duration.try_emplace(subject, duration);
            if (!inserted) it->second = std::max(it->second, duration);
        }
    }
    const double duration_cutoff =
        all_durations.empty() ? std::numeric_limits<double>::infinity()
                              : rules.trial_duration_factor * stats::median(all_durations);

    ExclusionReport report;
    for (const auto& [subject, events] : log.by_subject) {
        const int expected = rules.expected_trials * rules.grasps_per_trial;
        if (rules.require_complete && episode_count[subject] < expected) {
            report.excluded.emplace_back(subject, ExclusionReason::incomplete);
            continue;
        }
        const auto dur = max_duration.find(subject);
        if (dur != max_duration.end() && dur->second > duration_cutoff) {
            report.excluded.emplace_back(subject, ExclusionReason::long_trials);
            continue;
        }
        bool has_probe = false;
        for (const EventRecord& ev : events) {
            if (ev.kind == EventKind::latency) {
                has_probe = true;
                break;
            }
        }
        if (has_probe && median_rtt(log, subject) > rules.latency_ms) {
            report.excluded.emplace_back(subject, ExclusionReason::high_latency);
            continue;
        }
        report.included.push_back(subject);
    }
    return report;
}

EventLog filter_included(const EventLog& log, const ExclusionReport& report) {
    EventLog out;
    for (const std::string& subject : report.included) {
        const auto it = log.by_subject.find(subject);
        if (it != log.by_subject.end()) out.by_subject.emplace(subject, it->second);
    }
    return out;
}

namespace {

void write_record(std::ostream& out, const EventRecord& ev) {
    out << "{\"t\":" << csv::format_double(ev.t) << ",\"subject\":\"" << ev.subject
        << "\",\"kind\":\"" << to_string(ev.kind) << '"';
    switch (ev.kind) {
    case EventKind::trial_start: {
        const auto& p = std::get<TrialStart>(ev.payload);
        out << ",\"trial\":" << p.trial << ",\"algorithm\":\"" << to_string(p.algorithm) << '"';
        break;
    }
    case EventKind::pick:
        out << ",\"grasp\":" << std::get<Pick>(ev.payload).grasp;
        break;
    case EventKind::place: {
        const auto& p = std::get<Place>(ev.payload);
        out << ",\"grasp\":" << p.grasp << ",\"success\":" << (p.success ? "true" : "false");
        break;
    }
    case EventKind::trust:
        out << ",\"value\":" << csv::format_double(std::get<Trust>(ev.payload).value);
        break;
    case EventKind::latency:
        out << ",\"rtt_ms\":" << csv::format_double(std::get<LatencyProbe>(ev.payload).rtt_ms);
        break;
    case EventKind::trial_end:
        out << ",\"trial\":" << std::get<TrialEnd>(ev.payload).trial;
        break;
    }
    out << "}\n";
}

} // namespace

void write_event_log(std::ostream& out, const EventLog& log) {
    for (const auto& [subject, events] : log.by_subject) {
        for (const EventRecord& ev : events) write_record(out, ev);
    }
}

void write_episode_csv(std::ostream& out, const std::vector<GraspEpisode>& episodes) {
    csv::Writer w(out);
    w.header({"subject", "trial", "grasp", "is_final", "algorithm", "t_place", "success",
              "trust_at_pick", "horizon", "tRT", "trust_change"});
    for (const GraspEpisode& ep : episodes) {
        w.row({ep.subject, ep.trial, ep.grasp_number, ep.is_final ? "true" : "false",
               to_string(ep.algorithm), ep.t_place, ep.success ? "true" : "false",
               ep.trust_at_pick, ep.horizon,
               ep.tRT ? csv::Cell(*ep.tRT) : csv::Cell::empty(),
               ep.trust_change ? csv::Cell(*ep.trust_change) : csv::Cell::empty()});
    }
}

void write_exclusion_csv(std::ostream& out, const ExclusionReport& report) {
    csv::Writer w(out);
    w.header({"subject", "status", "reason"});
    for (const std::string& subject : report.included) {
        w.row({subject, "included", ""});
    }
    for (const auto& [subject, reason] : report.excluded) {
        w.row({subject, "excluded", to_string(reason)});
    }
}

} // namespace hazardlab
