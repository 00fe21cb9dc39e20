#ifndef HAZARDLAB_SIMULATE_HPP
#define HAZARDLAB_SIMULATE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hazardlab/events.hpp"
#include "hazardlab/hazard.hpp"
#include "hazardlab/rng.hpp"

namespace hazardlab {

/// Slider response to grasp outcomes: +delta_up on success, -delta_down on
/// failure, clipped to [0,100]. The slider keeps its position otherwise.
struct TrustDynamics {
    double delta_up = 4.0;
    double delta_down = 10.0;
    double initial = 50.0;
};

struct LatencySim {
    double rtt_mean_ms = 0.0;
    double rtt_sd_ms = 0.0;
    double probe_period_s = 10.0;
};

struct SimConfig {
    int n_subjects = 65;
    int trials_per_subject = 10;
    int grasps_per_trial = 4;
    double echo_failure_prob = 0.5;
    double t_place_mean = 10.0;
    double t_place_sd = 1.0;
    double inter_grasp_gap = 10.0;    // seconds after place until the next pick
    double final_grasp_horizon = 60.0; // observation window after the final pick
    HazardParams true_params{std::log(0.02), 0.5, 0.0, 3.0};
    TrustDynamics trust{};
    LatencySim latency{};
    std::uint64_t seed = 0;
};

/// Throws ConfigError naming the offending field.
void validate(const SimConfig& config);

struct GroundTruthEpisode {
    std::string subject;
    int trial = 0;
    int grasp = 0;
    Algorithm algorithm = Algorithm::gamma;
    bool success = false;
    double trust_at_pick = 50.0;
    double t_place = 0.0;
    double horizon = 0.0;
    std::optional<double> tRT;
};

struct SimResult {
    EventLog log;
    std::vector<GroundTruthEpisode> truth;
};

/// Solve cumulative_hazard(t) = target in closed form for the two-piece
/// constant hazard; +infinity when the target is unreachable.
double invert_cumulative_hazard(const HazardParams& p, const CovariateRow& x, double target);

/// Inverse-transform draw of a rating time; absent when the drawn time
/// falls beyond the horizon (the subject never rates this grasp).
std::optional<double> sample_rating_time(const HazardParams& p, const CovariateRow& x,
                                         double horizon, Rng& rng);

SimResult simulate_sessions(const SimConfig& config);

void write_ground_truth_csv(std::ostream& out, const std::vector<GroundTruthEpisode>& truth);

} // namespace hazardlab

#endif
