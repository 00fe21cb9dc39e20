#include <doctest.h>

#include <cmath>
#include <vector>

#include "hazardlab/errors.hpp"
#include "hazardlab/hazard.hpp"
#include "hazardlab/rng.hpp"
#include "test_support.hpp"

using namespace hazardlab;

TEST_SUITE("hazard") {

TEST_CASE("expansion: sub-width rating, no placement reached") {
    EpisodeObs ep;
    ep.x = {1.0, 0.5, 10.0};
    ep.horizon = 20.0;
    ep.rating = 3.2;
    const IntervalTable table = expand_to_intervals({{ep}}, 1.0);
    REQUIRE(table.rows.size() == 4);
    const std::vector<double> expect_e{1.0, 1.0, 1.0, 0.2};
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(table.rows[j].start == doctest::Approx(static_cast<double>(j)));
        CHECK(table.rows[j].e == doctest::Approx(expect_e[j]));
        CHECK(table.rows[j].d == (j == 3 ? 1 : 0));
        CHECK(table.rows[j].y == 0);
    }
}

TEST_CASE("expansion: rating at the pick instant collapses to one row") {
    EpisodeObs ep;
    ep.x = {0.0, 0.0, 10.0};
    ep.horizon = 20.0;
    ep.rating = 0.0;
    const IntervalTable table = expand_to_intervals({{ep}}, 0.5);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].e == 0.0);
    CHECK(table.rows[0].d == 1);
}

TEST_CASE("expansion: grid splits at the placement time") {
    EpisodeObs ep;
    ep.x = {0.0, 0.0, 10.0};
    ep.horizon = 20.0;
    ep.rating = 12.0;
    const IntervalTable table = expand_to_intervals({{ep}}, 4.0);
    REQUIRE(table.rows.size() == 4);
    const std::vector<double> starts{0.0, 4.0, 8.0, 10.0};
    const std::vector<double> e{4.0, 4.0, 2.0, 2.0};
    const std::vector<int> y{0, 0, 0, 1};
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(table.rows[j].start == starts[j]);
        CHECK(table.rows[j].e == e[j]);
        CHECK(table.rows[j].y == y[j]);
        CHECK(table.rows[j].d == (j == 3 ? 1 : 0));
    }
}

TEST_CASE("expansion: exposure sums to the rating time, one d per episode") {
    Rng rng(77001);
    const auto episodes = testsup::random_episodes(rng, 40);
    for (double width : {4.0, 1.0, 0.25, 0.33}) {
        const IntervalTable table = expand_to_intervals(episodes, width);
        std::vector<double> sum_e(episodes.size(), 0.0);
        std::vector<int> sum_d(episodes.size(), 0);
        for (const auto& row : table.rows) {
            sum_e[static_cast<std::size_t>(row.episode)] += row.e;
            sum_d[static_cast<std::size_t>(row.episode)] += row.d;
        }
        for (std::size_t i = 0; i < episodes.size(); ++i) {
            CHECK(sum_e[i] == doctest::Approx(*episodes[i].rating).epsilon(1e-12));
            CHECK(sum_d[i] == 1);
        }
    }
}

TEST_CASE("expansion rejects bad inputs") {
    EpisodeObs ep;
    ep.x = {0.0, 0.0, 10.0};
    ep.horizon = 5.0;
    ep.rating = 7.0; // beyond horizon
    CHECK_THROWS_AS((void)expand_to_intervals({{ep}}, 1.0), DataError);
    ep.rating = 3.0;
    CHECK_THROWS_AS((void)expand_to_intervals({{ep}}, 0.0), ConfigError);
    CHECK_THROWS_AS((void)expand_to_intervals({{ep}}, -1.0), ConfigError);
}

TEST_CASE("hazard rate: baseline, frozen value, coefficient nullity") {
    HazardParams p{std::log(0.05), 0.2, -0.1, 2.0};
    CHECK(hazard_rate({std::log(0.05), 5.0, -3.0, 2.0}, {0.0, 0.0, 1.0}, 0) ==
          doctest::Approx(0.05).epsilon(1e-14));
    // 0.05 * exp(0.2*1 - 0.1*0.5 + 2*1) = 0.05 * exp(2.15)
    CHECK(hazard_rate(p, {1.0, 0.5, 1.0}, 1) ==
          doctest::Approx(0.4292429198588947).epsilon(1e-13));
    HazardParams no_eta{std::log(0.8), 0.4, 0.3, 0.0};
    const CovariateRow x{1.0, 0.7, 4.0};
    CHECK(hazard_rate(no_eta, x, 0) == hazard_rate(no_eta, x, 1));
}

TEST_CASE("hazard ratio at placement equals exp(eta) to machine precision") {
    Rng rng(77002);
    for (int i = 0; i < 200; ++i) {
        const HazardParams p = testsup::random_params(rng);
        const CovariateRow x{rng.bernoulli(0.5) ? 1.0 : 0.0, rng.uniform(),
                             1.0 + 10.0 * rng.uniform()};
        const double ratio = hazard_rate(p, x, 1) / hazard_rate(p, x, 0);
        CHECK(ratio == doctest::Approx(std::exp(p.eta)).epsilon(1e-13));
    }
}

TEST_CASE("log-likelihood on single rows") {
    IntervalTable t;
    t.rows.push_back({0, 0, 0.0, 1.0, 0, 0.0, 0.0, 0});
    HazardParams p{std::log(0.05), 0.0, 0.0, 0.0};
    CHECK(log_likelihood(p, t) == doctest::Approx(-0.05).epsilon(1e-14));

    IntervalTable rated;
    rated.rows.push_back({0, 0, 0.0, 1.0, 1, 0.0, 0.0, 0});
    HazardParams unit{0.0, 0.0, 0.0, 0.0}; // lambda = 1
    // d*log(e*lambda) - e*lambda = log(1) - 1
    CHECK(log_likelihood(unit, rated) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("log-likelihood decreases monotonically as lambda0 -> 0 with a rating") {
    IntervalTable t;
    t.rows.push_back({0, 0, 0.0, 2.0, 1, 0.0, 0.0, 0});
    t.rows.push_back({0, 1, 2.0, 1.0, 0, 0.0, 0.0, 1});
    double prev = log_likelihood({std::log(0.5), 0.0, 0.0, 0.1}, t);
    for (double ll0 : {-2.0, -5.0, -10.0, -20.0}) {
        const double cur = log_likelihood({ll0, 0.0, 0.0, 0.1}, t);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("log-likelihood rejects a zero-exposure rating row") {
    IntervalTable t;
    t.rows.push_back({0, 0, 0.0, 0.0, 1, 0.0, 0.0, 0});
    CHECK_THROWS_AS((void)log_likelihood({0.0, 0.0, 0.0, 0.0}, t), DataError);
    CHECK_THROWS_AS((void)grad_log_likelihood({0.0, 0.0, 0.0, 0.0}, t), DataError);
    // e=0, d=0 rows contribute nothing
    IntervalTable ok;
    ok.rows.push_back({0, 0, 0.0, 0.0, 0, 1.0, 1.0, 1});
    ok.rows.push_back({0, 1, 0.0, 1.0, 0, 0.0, 0.0, 0});
    CHECK(log_likelihood({std::log(0.05), 3.0, 3.0, 3.0}, ok) == doctest::Approx(-0.05));
}

TEST_CASE("gradient is zero at the single-row stationary point") {
    IntervalTable t;
    t.rows.push_back({0, 0, 0.0, 1.0, 1, 0.0, 0.0, 0});
    const auto g = grad_log_likelihood({0.0, 0.0, 0.0, 0.0}, t);
    for (double v : g) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gradient matches central finite differences") {
    Rng rng(77003);
    for (int trial = 0; trial < 10; ++trial) {
        const auto episodes = testsup::random_episodes(rng, 15);
        const IntervalTable table = expand_to_intervals(episodes, 0.75);
        const HazardParams p = testsup::random_params(rng);
        const auto analytic = grad_log_likelihood(p, table);
        const auto fd = testsup::fd_gradient(
            [&](const HazardParams& q) { return log_likelihood(q, table); }, p);
        for (int k = 0; k < 4; ++k) {
            const double denom = std::max({1.0, std::fabs(analytic[static_cast<std::size_t>(k)]),
                                           std::fabs(fd[static_cast<std::size_t>(k)])});
            CHECK(std::fabs(analytic[static_cast<std::size_t>(k)] -
                            fd[static_cast<std::size_t>(k)]) /
                      denom <
                  1e-6);
        }
    }
}

TEST_CASE("cumulative hazard: closed form, trivial cases, quadrature oracle") {
    HazardParams p{std::log(0.1), 0.0, 0.0, std::log(2.0)};
    const CovariateRow x{0.0, 0.0, 10.0};
    CHECK(cumulative_hazard(p, x, 0.0) == 0.0);
    CHECK(cumulative_hazard(p, x, 15.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)cumulative_hazard(p, x, -1.0), std::invalid_argument);

    HazardParams flat{std::log(0.3), 0.1, -0.4, 0.0};
    const CovariateRow xf{1.0, 0.5, 7.0};
    for (double t : {0.5, 3.0, 7.0, 12.0}) {
        CHECK(cumulative_hazard(flat, xf, t) ==
              doctest::Approx(hazard_rate(flat, xf, 0) * t).epsilon(1e-13));
    }

    Rng rng(77004);
    for (int i = 0; i < 20; ++i) {
        const HazardParams q = testsup::random_params(rng);
        const CovariateRow xq{rng.bernoulli(0.5) ? 1.0 : 0.0, rng.uniform(),
                              2.0 + 10.0 * rng.uniform()};
        const double t = 25.0 * rng.uniform();
        const double quad = testsup::adaptive_simpson(
            [&](double s) { return hazard_at(q, xq, s); }, 0.0, t, 1e-13);
        CHECK(cumulative_hazard(q, xq, t) == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("survival: identities and frozen values") {
    HazardParams p{std::log(0.1), 0.0, 0.0, 0.0};
    const CovariateRow x{0.0, 0.0, 20.0};
    CHECK(survival(p, x, 0.0) == 1.0);
    CHECK(survival(p, x, 10.0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

    HazardParams two{std::log(0.1), 0.0, 0.0, std::log(2.0)};
    const CovariateRow x2{0.0, 0.0, 10.0};
    CHECK(survival(two, x2, 15.0) == doctest::Approx(0.1353352832366127).epsilon(1e-13));
    CHECK(rating_time_cdf(two, x2, 15.0) == doctest::Approx(0.8646647167633873).epsilon(1e-13));
    CHECK(rating_time_cdf(two, x2, 0.0) == 0.0);
    CHECK(rating_time_cdf(two, x2, 1e9) == doctest::Approx(1.0));
}

TEST_CASE("survival is non-increasing and differentiates back to the hazard") {
    Rng rng(77005);
    for (int i = 0; i < 20; ++i) {
        const HazardParams p = testsup::random_params(rng);
        const CovariateRow x{rng.bernoulli(0.5) ? 1.0 : 0.0, rng.uniform(),
                             3.0 + 8.0 * rng.uniform()};
        double prev = survival(p, x, 0.0);
        CHECK(prev == 1.0);
        for (double t = 0.25; t <= 30.0; t += 0.25) {
            const double cur = survival(p, x, t);
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
        // -d/dt log S(t) == hazard, checked away from the placement kink.
        for (double t : {0.4 * x.t_place, x.t_place + 4.0}) {
            const double h = 1e-6;
            const double fd =
                -(std::log(survival(p, x, t + h)) - std::log(survival(p, x, t - h))) / (2.0 * h);
            CHECK(fd == doctest::Approx(hazard_at(p, x, t)).epsilon(1e-6));
        }
    }
}

TEST_CASE("expanded gradient equals the exact piecewise-exponential gradient") {
    Rng rng(77006);
    for (int trial = 0; trial < 10; ++trial) {
        const auto episodes = testsup::random_episodes(rng, 20);
        const HazardParams p = testsup::random_params(rng);
        const auto exact = testsup::exact_gradient(p, episodes);
        for (double width : {4.0, 1.0, 0.25}) {
            const IntervalTable table = expand_to_intervals(episodes, width);
            const auto expanded = grad_log_likelihood(p, table);
            for (int k = 0; k < 4; ++k) {
                CHECK(std::fabs(expanded[static_cast<std::size_t>(k)] -
                                exact[static_cast<std::size_t>(k)]) < 1e-10);
            }
            // Log-likelihoods differ only by the parameter-free sum d*log(e).
            double d_log_e = 0.0;
            for (const auto& row : table.rows) {
                if (row.d && row.e > 0.0) d_log_e += std::log(row.e);
            }
            CHECK(log_likelihood(p, table) ==
                  doctest::Approx(testsup::exact_loglik(p, episodes) + d_log_e).epsilon(1e-10));
        }
    }
}

TEST_CASE("trust translation is absorbed by the baseline") {
    Rng rng(77007);
    const auto episodes = testsup::random_episodes(rng, 15);
    const HazardParams p = testsup::random_params(rng);
    const double c = 0.37;
    auto shifted = std::vector<EpisodeObs>(episodes.begin(), episodes.end());
    for (auto& ep : shifted) ep.x.x_trust += c;
    const HazardParams q{p.log_lambda0 - p.beta_trust * c, p.beta_success, p.beta_trust, p.eta};

    for (std::size_t i = 0; i < episodes.size(); ++i) {
        for (int y : {0, 1}) {
            CHECK(hazard_rate(q, shifted[i].x, y) ==
                  doctest::Approx(hazard_rate(p, episodes[i].x, y)).epsilon(1e-13));
        }
        for (double t : {1.0, 8.0, 14.0}) {
            CHECK(survival(q, shifted[i].x, t) ==
                  doctest::Approx(survival(p, episodes[i].x, t)).epsilon(1e-13));
        }
    }
    const auto g_orig = testsup::exact_gradient(p, episodes);
    const auto g_shift = testsup::exact_gradient(q, shifted);
    CHECK(g_shift[0] == doctest::Approx(g_orig[0]).epsilon(1e-12));
    CHECK(g_shift[1] == doctest::Approx(g_orig[1]).epsilon(1e-12));
    CHECK(g_shift[3] == doctest::Approx(g_orig[3]).epsilon(1e-12));
    // The trust component picks up exactly c times the baseline component.
    CHECK(g_shift[2] == doctest::Approx(g_orig[2] + c * g_orig[0]).epsilon(1e-10));
}

TEST_CASE("interval csv export carries the documented columns") {
    EpisodeObs ep;
    ep.x = {1.0, 0.25, 2.0};
    ep.horizon = 10.0;
    ep.rating = 3.0;
    const IntervalTable table = expand_to_intervals({{ep}}, 1.0);
    std::ostringstream out;
    write_interval_csv(out, table);
    const std::string text = out.str();
    CHECK(text.rfind("episode,interval,start,e,d,x_success,x_trust,y\n", 0) == 0);
    CHECK(text.find("0,0,0,1,0,1,0.25,0") != std::string::npos);
}

} // TEST_SUITE
