#ifndef HAZARDLAB_PIPELINE_HPP
#define HAZARDLAB_PIPELINE_HPP

#include <span>
#include <string>
#include <vector>

#include "hazardlab/events.hpp"
#include "hazardlab/hazard.hpp"

namespace hazardlab {

/// Episode table reduced to the survival model's inputs. Unrated episodes
/// are included only in the right-censoring mode.
EpisodeObs make_observation(const GraspEpisode& episode);
std::vector<EpisodeObs> collect_observations(std::span<const GraspEpisode> episodes,
                                             Cohort cohort, bool censored = false);

std::vector<GraspEpisode> cohort_episodes(std::span<const GraspEpisode> episodes, Cohort cohort);
std::vector<CovariateRow> rated_covariate_rows(std::span<const GraspEpisode> episodes,
                                               Cohort cohort);
std::vector<double> rated_times(std::span<const GraspEpisode> episodes, Cohort cohort);

struct SessionOptions {
    int latency_window = 5;
    bool apply_exclusion_rules = true;
    ExclusionRules rules{};
};

/// parse -> latency-correct -> exclude -> segment, collecting warnings.
struct Session {
    EventLog corrected;
    ExclusionReport exclusions;
    std::vector<GraspEpisode> episodes; // included subjects only
    int dropped_picks = 0;
    std::vector<std::string> warnings;
};

Session load_session(const std::string& events_path, const SessionOptions& options);

} // namespace hazardlab

#endif
