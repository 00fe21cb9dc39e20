#include "hazardlab/hazard.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"

namespace hazardlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_rate(const HazardParams& p, double x_success, double x_trust, int y) {
    return p.log_lambda0 + p.beta_success * x_success + p.beta_trust * x_trust +
           p.eta * static_cast<double>(y);
}
} // namespace

double hazard_rate(const HazardParams& p, const CovariateRow& x, int y) {
    return std::exp(log_rate(p, x.x_success, x.x_trust, y));
}

double hazard_at(const HazardParams& p, const CovariateRow& x, double t) {
    if (t < 0.0) throw std::invalid_argument("hazard_at: t < 0");
    return hazard_rate(p, x, t >= x.t_place ? 1 : 0);
}

IntervalTable expand_to_intervals(std::span<const EpisodeObs> episodes, double width,
                                  Cohort cohort) {
    if (!(width > 0.0)) throw ConfigError("interval width must be > 0");

    IntervalTable table;
    table.width = width;
    table.cohort = cohort;
    table.n_episodes = static_cast<int>(episodes.size());

    std::vector<double> starts;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const EpisodeObs& ep = episodes[i];
        const bool rated = ep.rating.has_value();
        if (rated) {
            ++table.n_rated;
            if (*ep.rating < 0.0) throw DataError("episode rating time < 0");
            if (*ep.rating > ep.horizon) throw DataError("episode rating time beyond horizon");
        }
        const double stop = rated ? *ep.rating : ep.horizon;
        const double t_place = ep.x.t_place;

        starts.clear();
        for (std::int64_t k = 0; static_cast<double>(k) * width < stop; ++k) {
            starts.push_back(static_cast<double>(k) * width);
        }
        if (starts.empty()) starts.push_back(0.0); // rating at the pick instant
        if (t_place > 0.0 && t_place < stop) {
            const auto pos = std::lower_bound(starts.begin(), starts.end(), t_place);
            if (pos == starts.end() || *pos != t_place) starts.insert(pos, t_place);
        }

        for (std::size_t j = 0; j < starts.size(); ++j) {
            IntervalRow row;
            row.episode = static_cast<std::int32_t>(i);
            row.interval = static_cast<std::int32_t>(j);
            row.start = starts[j];
            const bool last = j + 1 == starts.size();
            row.e = last ? stop - starts[j] : starts[j + 1] - starts[j];
            row.d = (last && rated) ? 1 : 0;
            row.x_success = ep.x.x_success;
            row.x_trust = ep.x.x_trust;
            row.y = starts[j] >= t_place ? 1 : 0;
            table.rows.push_back(row);
        }
    }
    return table;
}

double log_likelihood(const HazardParams& p, const IntervalTable& table) {
    double ll = 0.0;
    for (const IntervalRow& row : table.rows) {
        if (row.e == 0.0) {
            if (row.d) throw DataError("interval row with zero exposure but d=1");
            continue;
        }
        const double loglam = log_rate(p, row.x_success, row.x_trust, row.y);
        if (row.d) ll += std::log(row.e) + loglam;
        ll -= row.e * std::exp(loglam);
    }
    if (std::isnan(ll) || ll == kInf) throw DataError("non-finite log-likelihood");
    return ll;
}

std::array<double, 4> grad_log_likelihood(const HazardParams& p, const IntervalTable& table) {
    std::array<double, 4> g{0.0, 0.0, 0.0, 0.0};
    for (const IntervalRow& row : table.rows) {
        if (row.e == 0.0) {
            if (row.d) throw DataError("interval row with zero exposure but d=1");
            continue;
        }
        const double mu = row.e * std::exp(log_rate(p, row.x_success, row.x_trust, row.y));
        const double r = static_cast<double>(row.d) - mu;
        g[0] += r;
        g[1] += r * row.x_success;
        g[2] += r * row.x_trust;
        g[3] += r * static_cast<double>(row.y);
    }
    for (double v : g) {
        if (std::isnan(v)) throw DataError("non-finite log-likelihood gradient");
    }
    return g;
}

double cumulative_hazard(const HazardParams& p, const CovariateRow& x, double t) {
    if (t < 0.0) throw std::invalid_argument("cumulative_hazard: t < 0");
    const double pre = hazard_rate(p, x, 0);
    const double post = hazard_rate(p, x, 1);
    return pre * std::min(t, x.t_place) + post * std::max(0.0, t - x.t_place);
}

double survival(const HazardParams& p, const CovariateRow& x, double t) {
    return std::exp(-cumulative_hazard(p, x, t));
}

double rating_time_cdf(const HazardParams& p, const CovariateRow& x, double t) {
    return -std::expm1(-cumulative_hazard(p, x, t));
}

void write_interval_csv(std::ostream& out, const IntervalTable& table) {
    csv::Writer w(out);
    w.header({"episode", "interval", "start", "e", "d", "x_success", "x_trust", "y"});
    for (const IntervalRow& row : table.rows) {
        w.row({static_cast<int>(row.episode), static_cast<int>(row.interval), row.start, row.e,
               static_cast<int>(row.d), row.x_success, row.x_trust, static_cast<int>(row.y)});
    }
}

} // namespace hazardlab
