#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "hazardlab/errors.hpp"
#include "hazardlab/events.hpp"
#include "hazardlab/simulate.hpp"
#include "test_support.hpp"

using namespace hazardlab;

namespace {

SimConfig small_config(std::uint64_t seed) {
    SimConfig config;
    config.n_subjects = 5;
    config.seed = seed;
    return config;
}

} // namespace

TEST_SUITE("simulate") {

TEST_CASE("cumulative hazard inversion on the pre-placement branch") {
    // Constant hazard 0.1/s, target -ln(exp(-1)) = 1 -> t = 10.
    HazardParams p{std::log(0.1), 0.0, 0.0, 1.3};
    const CovariateRow x{0.0, 0.0, 20.0};
    CHECK(invert_cumulative_hazard(p, x, 1.0) == doctest::Approx(10.0).epsilon(1e-12));
    // Round trip through the closed-form cumulative hazard on both branches.
    for (double target : {0.2, 1.0, 2.5, 7.0}) {
        const double t = invert_cumulative_hazard(p, x, target);
        CHECK(cumulative_hazard(p, x, t) == doctest::Approx(target).epsilon(1e-10));
    }
}

TEST_CASE("zero hazard never produces a rating") {
    HazardParams p{-1000.0, 0.0, 0.0, 0.0}; // lambda0 underflows to 0
    const CovariateRow x{0.0, 0.0, 10.0};
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(sample_rating_time(p, x, 1e6, rng).has_value());
    }
}

TEST_CASE("sampled rating times match the closed-form cdf (KS test)") {
    HazardParams p{std::log(0.05), 0.3, -0.2, 2.0};
    const CovariateRow x{1.0, 0.5, 10.0};
    const double horizon = 20.0;
    Rng rng(2);
    std::vector<double> samples;
    while (samples.size() < 10000) {
        if (const auto t = sample_rating_time(p, x, horizon, rng)) samples.push_back(*t);
    }
    std::sort(samples.begin(), samples.end());
    const double f_h = rating_time_cdf(p, x, horizon);
    double ks = 0.0;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = rating_time_cdf(p, x, samples[i]) / f_h; // truncated cdf
        ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    CHECK(ks < 1.6276236115189502 / std::sqrt(n)); // alpha = 0.01 critical value
}

TEST_CASE("frozen trust dynamics leave the slider untouched") {
    SimConfig config = small_config(11);
    config.echo_failure_prob = 0.0;
    config.trust.delta_up = 0.0;
    const SimResult sim = simulate_sessions(config);
    const SegmentationResult seg = segment_grasps(sim.log);
    std::size_t rated = 0;
    for (const GraspEpisode& ep : seg.episodes) {
        CHECK(ep.trust_at_pick == 50.0);
        if (ep.trust_change) {
            ++rated;
            CHECK(*ep.trust_change == 0.0);
        }
    }
    CHECK(rated > 0);
}

TEST_CASE("default design yields subjects x trials x grasps episodes") {
    SimConfig config;
    config.n_subjects = 65;
    config.seed = 42;
    const SimResult sim = simulate_sessions(config);
    CHECK(sim.truth.size() == 65u * 10u * 4u);
    const SegmentationResult seg = segment_grasps(sim.log);
    CHECK(seg.episodes.size() == 2600);
    CHECK(seg.dropped_picks == 0);
}

TEST_CASE("event log round trip reproduces the ground truth exactly") {
    const SimConfig config = small_config(77);
    const SimResult sim = simulate_sessions(config);

    std::stringstream buffer;
    write_event_log(buffer, sim.log);
    const EventLog parsed = parse_event_log(buffer);
    const EventLog corrected = correct_latency(parsed, 5); // zero RTT: a no-op
    const SegmentationResult seg = segment_grasps(corrected);

    REQUIRE(seg.episodes.size() == sim.truth.size());
    for (std::size_t i = 0; i < seg.episodes.size(); ++i) {
        const GraspEpisode& got = seg.episodes[i];
        const GroundTruthEpisode& want = sim.truth[i];
        CHECK(got.subject == want.subject);
        CHECK(got.trial == want.trial);
        CHECK(got.grasp_number == want.grasp);
        CHECK(got.is_final == (want.grasp == 4));
        CHECK(got.algorithm == want.algorithm);
        CHECK(got.success == want.success);
        CHECK(got.trust_at_pick == want.trust_at_pick);
        CHECK(got.t_place == want.t_place);
        CHECK(got.horizon == want.horizon);
        REQUIRE(got.tRT.has_value() == want.tRT.has_value());
        if (got.tRT) CHECK(*got.tRT == *want.tRT);
    }
}

TEST_CASE("latency correction restores shifted logs to near truth") {
    SimConfig config = small_config(78);
    config.latency.rtt_mean_ms = 100.0;
    const SimResult delayed = simulate_sessions(config);
    config.latency.rtt_mean_ms = 0.0;
    const SimResult truth = simulate_sessions(config);

    const EventLog corrected = correct_latency(delayed.log, 5);
    const auto non_latency = [](const std::vector<EventRecord>& events) {
        std::vector<const EventRecord*> out;
        for (const EventRecord& ev : events) {
            if (ev.kind != EventKind::latency) out.push_back(&ev);
        }
        return out;
    };
    for (const auto& [subject, events] : corrected.by_subject) {
        const auto got = non_latency(events);
        const auto want = non_latency(truth.log.by_subject.at(subject));
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i]->kind == want[i]->kind);
            CHECK(std::fabs(got[i]->t - want[i]->t) < 0.05);
        }
    }
}

TEST_CASE("rated fraction grows with the baseline hazard (common random numbers)") {
    std::vector<std::size_t> rated_counts;
    for (double lambda0 : {0.005, 0.02, 0.08}) {
        SimConfig config = small_config(99);
        config.n_subjects = 20;
        config.true_params.log_lambda0 = std::log(lambda0);
        config.true_params.beta_trust = 0.0; // hazard proportional across runs
        const SimResult sim = simulate_sessions(config);
        std::size_t rated = 0;
        for (const auto& ep : sim.truth) rated += ep.tRT.has_value();
        rated_counts.push_back(rated);
    }
    CHECK(rated_counts[0] <= rated_counts[1]);
    CHECK(rated_counts[1] <= rated_counts[2]);
    CHECK(rated_counts[0] < rated_counts[2]);
}

TEST_CASE("eta = 0 rating times follow a truncated exponential") {
    HazardParams p{std::log(0.08), 0.0, 0.0, 0.0};
    const CovariateRow x{0.0, 0.0, 10.0};
    const double horizon = 25.0;
    const double lambda = 0.08;
    Rng rng(3);
    std::vector<double> samples;
    while (samples.size() < 20000) {
        if (const auto t = sample_rating_time(p, x, horizon, rng)) samples.push_back(*t);
    }
    double mean = 0.0;
    for (double t : samples) mean += t;
    mean /= static_cast<double>(samples.size());
    const double z = lambda * horizon;
    const double expected = 1.0 / lambda - horizon * std::exp(-z) / (1.0 - std::exp(-z));
    double sd = 0.0;
    for (double t : samples) sd += (t - mean) * (t - mean);
    sd = std::sqrt(sd / (static_cast<double>(samples.size()) - 1.0));
    const double se = sd / std::sqrt(static_cast<double>(samples.size()));
    CHECK(std::fabs(mean - expected) < 3.0 * se);
}

TEST_CASE("large eta concentrates ratings just after placement, mostly in grasp 4") {
    SimConfig config;
    config.n_subjects = 30;
    config.seed = 4;
    config.true_params = {std::log(0.002), 0.0, 0.0, std::log(15.0)};
    const SimResult sim = simulate_sessions(config);

    std::array<std::size_t, 4> per_grasp{0, 0, 0, 0};
    std::size_t after_place = 0, rated = 0;
    for (const auto& ep : sim.truth) {
        if (!ep.tRT) continue;
        ++rated;
        per_grasp[static_cast<std::size_t>(ep.grasp - 1)] += 1;
        if (*ep.tRT >= ep.t_place) ++after_place;
    }
    REQUIRE(rated > 100);
    CHECK(static_cast<double>(after_place) / static_cast<double>(rated) > 0.9);
    CHECK(per_grasp[3] > per_grasp[0]);
    CHECK(per_grasp[3] > per_grasp[1]);
    CHECK(per_grasp[3] > per_grasp[2]);
}

TEST_CASE("config validation names the offending field") {
    SimConfig config;
    config.echo_failure_prob = 1.5;
    CHECK_THROWS_WITH_AS((void)simulate_sessions(config), doctest::Contains("echo_failure_prob"),
                         ConfigError);
    config = SimConfig{};
    config.t_place_mean = -1.0;
    CHECK_THROWS_WITH_AS((void)simulate_sessions(config), doctest::Contains("t_place_mean"),
                         ConfigError);
}

TEST_CASE("ground truth csv carries the documented header") {
    const SimResult sim = simulate_sessions(small_config(5));
    std::ostringstream out;
    write_ground_truth_csv(out, sim.truth);
    CHECK(out.str().rfind("subject,trial,grasp,algorithm,success,trust_at_pick,t_place,horizon,"
                          "tRT\n",
                          0) == 0);
}

} // TEST_SUITE
