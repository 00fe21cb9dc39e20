#ifndef HAZARDLAB_INFERENCE_HPP
#define HAZARDLAB_INFERENCE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hazardlab/hazard.hpp"
#include "hazardlab/rng.hpp"

namespace hazardlab {

/// Normal prior on one unconstrained parameter. An infinite sd means flat.
struct Prior {
    double mean = 0.0;
    double sd = 2.0;
    bool flat() const { return !std::isfinite(sd); }
};

struct FitConfig {
    int chains = 4;
    int draws = 5000;
    int warmup = 2000;
    std::uint64_t seed = 0;
    std::array<Prior, 4> priors{}; // log_lambda0, beta_success, beta_trust, eta
    double target_accept = 0.30;
    int max_init_retries = 100;
    int threads = 0; // 0 = auto; HAZARDLAB_THREADS caps either way
};

struct Chain {
    std::vector<std::array<double, 4>> draws; // post-warmup only
    double acceptance_rate = 0.0;
    std::uint64_t seed = 0;
};

struct PosteriorChains {
    std::vector<Chain> chains;
    std::size_t draws_per_chain() const { return chains.empty() ? 0 : chains[0].draws.size(); }
    std::vector<double> pooled(int param) const;
};

struct RhatResult {
    double value = 1.0;
    bool degenerate = false; // zero within-chain variance
};

struct ParamStats {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double q_low = 0.0;
    double q_high = 0.0;
    RhatResult rhat;
};

/// Pooled posterior summaries; the baseline hazard appears both on the log
/// scale and exponentiated.
struct ParamSummary {
    std::vector<ParamStats> params;
    double interval_mass = 0.94;
};

/// Log target density over an unconstrained vector; may return -infinity.
using LogDensity = std::function<double(std::span<const double>)>;

struct SamplerOptions {
    int draws = 1000;
    int warmup = 500;
    double target_accept = 0.30;
};

struct ChainDraws {
    std::vector<std::vector<double>> draws;
    double acceptance_rate = 0.0;
};

/// Adaptive random-walk Metropolis. During warmup a per-coordinate scale is
/// estimated from the running sample variance and a global step is steered
/// toward the target acceptance rate; both freeze at the end of warmup.
ChainDraws run_chain(const LogDensity& log_target, std::vector<double> init, Rng rng,
                     const SamplerOptions& options);

/// Sample the posterior of the hazard parameters given an interval table.
/// Deterministic for a fixed (table, config).
PosteriorChains fit(const IntervalTable& table, const FitConfig& config);

/// Split-chain potential scale reduction factor for one parameter.
RhatResult split_rhat(const PosteriorChains& chains, int param);
RhatResult split_rhat(const std::vector<std::vector<double>>& chains);

ParamSummary summarize(const PosteriorChains& chains);

/// Posterior mode via damped Newton ascent with backtracking line search;
/// converged when the gradient max-norm drops below `grad_tol`.
HazardParams map_estimate(const IntervalTable& table, const FitConfig& config,
                          double grad_tol = 1e-8, int max_iter = 500);

double log_posterior(const HazardParams& params, const IntervalTable& table,
                     const std::array<Prior, 4>& priors);

void write_posterior_csv(std::ostream& out, const PosteriorChains& chains);
void write_summary_csv(std::ostream& out, const ParamSummary& summary);
PosteriorChains read_posterior_csv(std::istream& in);

} // namespace hazardlab

#endif
