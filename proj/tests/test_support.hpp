#ifndef HAZARDLAB_TEST_SUPPORT_HPP
#define HAZARDLAB_TEST_SUPPORT_HPP

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hazardlab/events.hpp"
#include "hazardlab/hazard.hpp"
#include "hazardlab/rng.hpp"

namespace testsup {

/// Adaptive Simpson quadrature, used as an integration oracle.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const auto simpson = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    };
    std::function<double(double, double, double, double, int)> recurse =
        [&](double lo, double hi, double whole, double eps, int level) -> double {
        const double mid = 0.5 * (lo + hi);
        const double left = simpson(lo, mid);
        const double right = simpson(mid, hi);
        if (level <= 0 || std::fabs(left + right - whole) < 15.0 * eps) {
            return left + right + (left + right - whole) / 15.0;
        }
        return recurse(lo, mid, left, eps / 2.0, level - 1) +
               recurse(mid, hi, right, eps / 2.0, level - 1);
    };
    return recurse(a, b, simpson(a, b), tol, depth);
}

/// Central finite differences of a scalar function of 4 parameters.
inline std::array<double, 4> fd_gradient(
    const std::function<double(const hazardlab::HazardParams&)>& f,
    const hazardlab::HazardParams& at, double step = 1e-5) {
    std::array<double, 4> g{};
    const auto base = at.as_array();
    for (int k = 0; k < 4; ++k) {
        auto hi = base, lo = base;
        hi[static_cast<std::size_t>(k)] += step;
        lo[static_cast<std::size_t>(k)] -= step;
        g[static_cast<std::size_t>(k)] = (f(hazardlab::HazardParams::from_array(hi)) -
                                          f(hazardlab::HazardParams::from_array(lo))) /
                                         (2.0 * step);
    }
    return g;
}

/// Exact piecewise-exponential log-likelihood over rated episodes:
/// sum of log(hazard at the rating) - cumulative hazard at the rating.
/// An independent route used to check the interval expansion.
inline double exact_loglik(const hazardlab::HazardParams& p,
                           std::span<const hazardlab::EpisodeObs> episodes) {
    double ll = 0.0;
    for (const auto& ep : episodes) {
        if (ep.rating) {
            ll += std::log(hazardlab::hazard_at(p, ep.x, *ep.rating)) -
                  hazardlab::cumulative_hazard(p, ep.x, *ep.rating);
        } else {
            ll -= hazardlab::cumulative_hazard(p, ep.x, ep.horizon);
        }
    }
    return ll;
}

/// Hand-derived gradient of exact_loglik from the closed forms.
inline std::array<double, 4> exact_gradient(const hazardlab::HazardParams& p,
                                            std::span<const hazardlab::EpisodeObs> episodes) {
    std::array<double, 4> g{};
    for (const auto& ep : episodes) {
        const double stop = ep.rating ? *ep.rating : ep.horizon;
        const double post_span = std::max(0.0, stop - ep.x.t_place);
        const double lambda_post = hazardlab::hazard_rate(p, ep.x, 1);
        const double cum = hazardlab::cumulative_hazard(p, ep.x, stop);
        double u0 = 0.0, u1 = 0.0, u2 = 0.0, u3 = 0.0;
        if (ep.rating) {
            const int y = *ep.rating >= ep.x.t_place ? 1 : 0;
            u0 = 1.0;
            u1 = ep.x.x_success;
            u2 = ep.x.x_trust;
            u3 = static_cast<double>(y);
        }
        g[0] += u0 - cum;
        g[1] += u1 - ep.x.x_success * cum;
        g[2] += u2 - ep.x.x_trust * cum;
        g[3] += u3 - lambda_post * post_span;
    }
    return g;
}

/// Random rated episodes with continuous rating times (never exactly at
/// the placement instant or on the interval grid).
inline std::vector<hazardlab::EpisodeObs> random_episodes(hazardlab::Rng& rng, int count) {
    std::vector<hazardlab::EpisodeObs> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        hazardlab::EpisodeObs ep;
        ep.x.x_success = rng.bernoulli(0.7) ? 1.0 : 0.0;
        ep.x.x_trust = rng.uniform();
        ep.x.t_place = 5.0 + 10.0 * rng.uniform();
        ep.horizon = ep.x.t_place + 5.0 + 10.0 * rng.uniform();
        ep.rating = (0.02 + 0.96 * rng.uniform()) * ep.horizon;
        out.push_back(ep);
    }
    return out;
}

inline hazardlab::HazardParams random_params(hazardlab::Rng& rng) {
    return {std::log(0.01 + 0.2 * rng.uniform()), rng.normal(0.0, 0.5), rng.normal(0.0, 0.5),
            rng.normal(1.0, 0.8)};
}

inline hazardlab::EventLog parse_lines(const std::vector<std::string>& lines) {
    std::ostringstream joined;
    for (const auto& line : lines) joined << line << '\n';
    std::istringstream in(joined.str());
    return hazardlab::parse_event_log(in);
}

} // namespace testsup

#endif
