#include "hazardlab/pipeline.hpp"

#include <fstream>

#include "hazardlab/errors.hpp"

namespace hazardlab {

EpisodeObs make_observation(const GraspEpisode& episode) {
    EpisodeObs obs;
    obs.x.x_success = episode.success ? 1.0 : 0.0;
    obs.x.x_trust = episode.trust_at_pick / 100.0;
    obs.x.t_place = episode.t_place;
    obs.horizon = episode.horizon;
    obs.rating = episode.tRT;
    return obs;
}

std::vector<EpisodeObs> collect_observations(std::span<const GraspEpisode> episodes,
                                             Cohort cohort, bool censored) {
    std::vector<EpisodeObs> out;
    for (const GraspEpisode& ep : episodes) {
        if (ep.is_final != (cohort == Cohort::final)) continue;
        if (!ep.tRT && !censored) continue;
        out.push_back(make_observation(ep));
    }
    return out;
}

std::vector<GraspEpisode> cohort_episodes(std::span<const GraspEpisode> episodes, Cohort cohort) {
    std::vector<GraspEpisode> out;
    for (const GraspEpisode& ep : episodes) {
        if (ep.is_final == (cohort == Cohort::final)) out.push_back(ep);
    }
    return out;
}

std::vector<CovariateRow> rated_covariate_rows(std::span<const GraspEpisode> episodes,
                                               Cohort cohort) {
    std::vector<CovariateRow> rows;
    for (const GraspEpisode& ep : episodes) {
        if (ep.is_final != (cohort == Cohort::final) || !ep.tRT) continue;
        rows.push_back(make_observation(ep).x);
    }
    return rows;
}

std::vector<double> rated_times(std::span<const GraspEpisode> episodes, Cohort cohort) {
    std::vector<double> times;
    for (const GraspEpisode& ep : episodes) {
        if (ep.is_final != (cohort == Cohort::final) || !ep.tRT) continue;
        times.push_back(*ep.tRT);
    }
    return times;
}

Session load_session(const std::string& events_path, const SessionOptions& options) {
    std::ifstream in(events_path);
    if (!in) throw DataError("cannot open event log: " + events_path);

    Session session;
    const EventLog raw = parse_event_log(in);
    session.corrected = correct_latency(raw, options.latency_window, &session.warnings);

    EventLog kept = session.corrected;
    if (options.apply_exclusion_rules && !session.corrected.by_subject.empty()) {
        session.exclusions = apply_exclusions(session.corrected, options.rules);
        kept = filter_included(session.corrected, session.exclusions);
        for (const auto& [subject, reason] : session.exclusions.excluded) {
            session.warnings.push_back("excluded subject '" + subject + "': " +
                                       to_string(reason));
        }
    } else {
        session.exclusions.included = session.corrected.subjects();
    }

    SegmentationResult seg = segment_grasps(kept);
    session.episodes = std::move(seg.episodes);
    session.dropped_picks = seg.dropped_picks;
    session.warnings.insert(session.warnings.end(), seg.warnings.begin(), seg.warnings.end());
    return session;
}

} // namespace hazardlab
