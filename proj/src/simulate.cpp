#include "hazardlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"

namespace hazardlab {

void validate(const SimConfig& config) {
    const auto positive = [](double v, const char* field) {
        if (!(v > 0.0)) throw ConfigError(std::string(field) + " must be > 0");
    };
    if (config.n_subjects < 0) throw ConfigError("n_subjects must be >= 0");
    if (config.trials_per_subject < 1) throw ConfigError("trials_per_subject must be >= 1");
    if (config.grasps_per_trial < 1) throw ConfigError("grasps_per_trial must be >= 1");
    if (!(config.echo_failure_prob >= 0.0 && config.echo_failure_prob <= 1.0)) {
        throw ConfigError("echo_failure_prob must be in [0,1]");
    }
    positive(config.t_place_mean, "t_place_mean");
    if (config.t_place_sd < 0.0) throw ConfigError("t_place_sd must be >= 0");
    positive(config.inter_grasp_gap, "inter_grasp_gap");
    positive(config.final_grasp_horizon, "final_grasp_horizon");
    if (config.final_grasp_horizon <= config.t_place_mean) {
        throw ConfigError("final_grasp_horizon must exceed t_place_mean");
    }
    if (!(config.trust.initial >= 0.0 && config.trust.initial <= 100.0)) {
        throw ConfigError("trust.initial must be in [0,100]");
    }
    if (config.trust.delta_up < 0.0) throw ConfigError("trust.delta_up must be >= 0");
    if (config.trust.delta_down < 0.0) throw ConfigError("trust.delta_down must be >= 0");
    if (config.latency.rtt_mean_ms < 0.0) throw ConfigError("latency.rtt_mean_ms must be >= 0");
    if (config.latency.rtt_sd_ms < 0.0) throw ConfigError("latency.rtt_sd_ms must be >= 0");
    positive(config.latency.probe_period_s, "latency.probe_period_s");
}

double invert_cumulative_hazard(const HazardParams& p, const CovariateRow& x, double target) {
    if (target < 0.0) throw std::invalid_argument("invert_cumulative_hazard: target < 0");
    const double pre = hazard_rate(p, x, 0);
    const double post = hazard_rate(p, x, 1);
    const double at_place = pre * x.t_place;
    if (target <= at_place && pre > 0.0) return target / pre;
    if (post <= 0.0) return std::numeric_limits<double>::infinity();
    return x.t_place + (target - at_place) / post;
}

std::optional<double> sample_rating_time(const HazardParams& p, const CovariateRow& x,
                                         double horizon, Rng& rng) {
    const double u = rng.uniform();                 // [0, 1)
    const double target = -std::log1p(-u);          // Exp(1), strictly > 0 except u=0
    if (!(target > 0.0)) return std::nullopt;
    const double t = invert_cumulative_hazard(p, x, target);
    if (t > horizon) return std::nullopt;
    return t;
}

namespace {

std::string subject_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%04d", index + 1);
    return buf;
}

struct SubjectOutput {
    std::vector<EventRecord> events; // true (undelayed) times
    std::vector<GroundTruthEpisode> truth;
    double session_end = 0.0;
};

SubjectOutput simulate_subject(const SimConfig& config, const std::string& subject, Rng rng) {
    SubjectOutput out;
    double slider = config.trust.initial;
    double cursor = 0.0;

    const auto emit = [&](double t, EventKind kind, auto payload) {
        EventRecord rec;
        rec.t = t;
        rec.subject = subject;
        rec.kind = kind;
        rec.payload = payload;
        out.events.push_back(std::move(rec));
    };

    for (int trial = 1; trial <= config.trials_per_subject; ++trial) {
        const Algorithm algorithm = rng.bernoulli(0.5) ? Algorithm::gamma : Algorithm::echo;
        emit(cursor, EventKind::trial_start, TrialStart{trial, algorithm});

        double pick_t = cursor;
        for (int grasp = 1; grasp <= config.grasps_per_trial; ++grasp) {
            const bool is_final = grasp == config.grasps_per_trial;
            // Fixed draw budget per grasp: success, t_place (2 engine calls
            // inside normal), rating. Keeps common-random-number sweeps aligned.
            const double u_success = rng.uniform();
            const bool success =
                algorithm == Algorithm::gamma ? true : u_success >= config.echo_failure_prob;
            double t_place = rng.normal(config.t_place_mean, config.t_place_sd);
            const double max_place =
                is_final ? config.final_grasp_horizon - 0.5 : std::numeric_limits<double>::max();
            t_place = std::clamp(t_place, 0.5, max_place);

            const double nominal_horizon =
                is_final ? config.final_grasp_horizon : t_place + config.inter_grasp_gap;

            emit(pick_t, EventKind::pick, Pick{grasp});
            const double place_abs = pick_t + t_place;
            emit(place_abs, EventKind::place, Place{grasp, success});

            GroundTruthEpisode gt;
            gt.subject = subject;
            gt.trial = trial;
            gt.grasp = grasp;
            gt.algorithm = algorithm;
            gt.success = success;
            gt.trust_at_pick = slider;
            // Store the values as they will be recovered from absolute log
            // times, so the round trip through the log is bit-exact.
            gt.t_place = place_abs - pick_t;

            const double end_abs = pick_t + nominal_horizon;
            gt.horizon = end_abs - pick_t;

            CovariateRow x{success ? 1.0 : 0.0, slider / 100.0, gt.t_place};
            const auto rating = sample_rating_time(config.true_params, x, nominal_horizon, rng);
            if (rating) {
                const double rating_abs = pick_t + *rating;
                const double rating_rel = rating_abs - pick_t;
                if (rating_rel > 0.0 && rating_rel <= gt.horizon) {
                    slider = std::clamp(slider + (success ? config.trust.delta_up
                                                          : -config.trust.delta_down),
                                        0.0, 100.0);
                    emit(rating_abs, EventKind::trust, Trust{slider});
                    gt.tRT = rating_rel;
                }
            }
            out.truth.push_back(std::move(gt));

            if (is_final) {
                emit(end_abs, EventKind::trial_end, TrialEnd{trial});
                cursor = end_abs + config.inter_grasp_gap;
            } else {
                pick_t = end_abs;
            }
        }
    }
    out.session_end = out.events.empty() ? 0.0 : out.events.back().t;

    // Latency probes on a fixed schedule across the whole session.
    std::vector<EventRecord> probes;
    for (double t = 0.0; t <= out.session_end;
         t += config.latency.probe_period_s) {
        const double rtt =
            std::max(0.0, rng.normal(config.latency.rtt_mean_ms, config.latency.rtt_sd_ms));
        EventRecord rec;
        rec.t = t;
        rec.subject = subject;
        rec.kind = EventKind::latency;
        rec.payload = LatencyProbe{rtt};
        probes.push_back(std::move(rec));
    }

    // Network delay: non-latency events are logged half an RTT late, using
    // the probe nearest in time; probes keep their scheduled timestamps.
    if (config.latency.rtt_mean_ms > 0.0 || config.latency.rtt_sd_ms > 0.0) {
        for (EventRecord& ev : out.events) {
            const auto idx = static_cast<std::size_t>(std::clamp(
                std::llround(ev.t / config.latency.probe_period_s), 0LL,
                static_cast<long long>(probes.size()) - 1));
            ev.t += std::get<LatencyProbe>(probes[idx].payload).rtt_ms / 2000.0;
        }
    }

    out.events.insert(out.events.end(), probes.begin(), probes.end());
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
    return out;
}

} // namespace

SimResult simulate_sessions(const SimConfig& config) {
    validate(config);
    SimResult result;
    for (int s = 0; s < config.n_subjects; ++s) {
        const std::string subject = subject_id(s);
        SubjectOutput out =
            simulate_subject(config, subject, Rng::stream(config.seed, static_cast<std::uint64_t>(s)));
        result.log.by_subject.emplace(subject, std::move(out.events));
        result.truth.insert(result.truth.end(), out.truth.begin(), out.truth.end());
    }
    return result;
}

void write_ground_truth_csv(std::ostream& out, const std::vector<GroundTruthEpisode>& truth) {
    csv::Writer w(out);
    w.header({"subject", "trial", "grasp", "algorithm", "success", "trust_at_pick", "t_place",
              "horizon", "tRT"});
    for (const GroundTruthEpisode& ep : truth) {
        w.row({ep.subject, ep.trial, ep.grasp, to_string(ep.algorithm),
               ep.success ? "true" : "false", ep.trust_at_pick, ep.t_place, ep.horizon,
               ep.tRT ? csv::Cell(*ep.tRT) : csv::Cell::empty()});
    }
}

} // namespace hazardlab
