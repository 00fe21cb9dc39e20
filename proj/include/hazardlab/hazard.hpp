#ifndef HAZARDLAB_HAZARD_HPP
#define HAZARDLAB_HAZARD_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace hazardlab {

/// Proportional-hazards parameters. The baseline rate is kept on the log
/// scale so the whole parameter vector is unconstrained.
struct HazardParams {
    double log_lambda0 = 0.0;
    double beta_success = 0.0;
    double beta_trust = 0.0;
    double eta = 0.0;

    double lambda0() const { return std::exp(log_lambda0); }

    std::array<double, 4> as_array() const {
        return {log_lambda0, beta_success, beta_trust, eta};
    }
    static HazardParams from_array(const std::array<double, 4>& a) {
        return {a[0], a[1], a[2], a[3]};
    }
};

/// Parameter names in the canonical gradient/draw ordering.
inline constexpr std::array<const char*, 4> kParamNames = {
    "log_lambda0", "beta_success", "beta_trust", "eta"};

/// Covariates of one grasp episode. x_trust is the slider value rescaled
/// to [0,1]; t_place is when the grasp-completion covariate switches 0->1.
struct CovariateRow {
    double x_success = 0.0;
    double x_trust = 0.0;
    double t_place = 0.0;
};

enum class Cohort { early, final };

/// Episode-level observation fed to the interval expansion. `rating` is the
/// rating time since pick; a disengaged episode (no rating) only enters in
/// the right-censoring mode and contributes exposure up to `horizon`.
struct EpisodeObs {
    CovariateRow x;
    double horizon = 0.0;
    std::optional<double> rating;
};

struct IntervalRow {
    std::int32_t episode = 0;
    std::int32_t interval = 0;
    double start = 0.0;
    double e = 0.0;  // exposure seconds
    std::int8_t d = 0;
    double x_success = 0.0;
    double x_trust = 0.0;
    std::int8_t y = 0;
};

struct IntervalTable {
    std::vector<IntervalRow> rows;
    double width = 0.5;
    Cohort cohort = Cohort::early;
    int n_episodes = 0;
    int n_rated = 0;
};

/// lambda0 * exp(beta_success*x_success + beta_trust*x_trust + eta*y).
double hazard_rate(const HazardParams& p, const CovariateRow& x, int y);

/// Hazard at elapsed time t; the completion covariate switches
/// right-continuously at t_place.
double hazard_at(const HazardParams& p, const CovariateRow& x, double t);

/// Split each episode into a grid of step `width`, additionally broken at
/// t_place so the time-varying covariate is constant per interval. Exposure
/// stops at the rating time; the rating interval (right-closed) carries d=1.
IntervalTable expand_to_intervals(std::span<const EpisodeObs> episodes, double width,
                                  Cohort cohort = Cohort::early);

/// Poisson log-likelihood sum of d*log(e*lambda) - e*lambda. Rows with
/// e=0, d=0 contribute nothing; a row with e=0, d=1 is rejected. May return
/// -infinity (vanishing rating density); NaN raises.
double log_likelihood(const HazardParams& p, const IntervalTable& table);

/// Analytic gradient over (log_lambda0, beta_success, beta_trust, eta):
/// sum of (d - e*lambda) times the covariate attached to each coordinate.
std::array<double, 4> grad_log_likelihood(const HazardParams& p, const IntervalTable& table);

/// Closed-form cumulative hazard of the two-piece constant-covariate case.
double cumulative_hazard(const HazardParams& p, const CovariateRow& x, double t);

/// S(t) = exp(-cumulative_hazard(t)).
double survival(const HazardParams& p, const CovariateRow& x, double t);

/// F(t) = 1 - S(t).
double rating_time_cdf(const HazardParams& p, const CovariateRow& x, double t);

void write_interval_csv(std::ostream& out, const IntervalTable& table);

} // namespace hazardlab

#endif
