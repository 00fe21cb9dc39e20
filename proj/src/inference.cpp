#include "hazardlab/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"
#include "hazardlab/stats.hpp"

namespace hazardlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Interval rows grouped by distinct covariate value; the Poisson
/// log-likelihood only depends on (sum_e, sum_d) per group plus the
/// parameter-free sum of d*log(e).
struct CompressedTable {
    struct Cell {
        double x_success;
        double x_trust;
        double y;
        double sum_e = 0.0;
        double sum_d = 0.0;
    };
    std::vector<Cell> cells;
    double d_log_e = 0.0;
    int n_rated = 0;

    explicit CompressedTable(const IntervalTable& table) {
        std::map<std::tuple<double, double, std::int8_t>, std::size_t> index;
        for (const IntervalRow& row : table.rows) {
            if (row.e == 0.0) {
                if (row.d) throw DataError("interval row with zero exposure but d=1");
                continue;
            }
            const auto key = std::make_tuple(row.x_success, row.x_trust, row.y);
            auto [it, inserted] = index.try_emplace(key, cells.size());
            if (inserted) {
                cells.push_back({row.x_success, row.x_trust, static_cast<double>(row.y)});
            }
            Cell& cell = cells[it->second];
            cell.sum_e += row.e;
            cell.sum_d += row.d;
            if (row.d) {
                d_log_e += std::log(row.e);
                ++n_rated;
            }
        }
    }

    double loglik(std::span<const double> th) const {
        double ll = d_log_e;
        for (const Cell& c : cells) {
            const double loglam = th[0] + th[1] * c.x_success + th[2] * c.x_trust + th[3] * c.y;
            ll += c.sum_d * loglam - c.sum_e * std::exp(loglam);
        }
        return std::isnan(ll) ? kNegInf : ll;
    }

    void grad(std::span<const double> th, std::array<double, 4>& g) const {
        g = {0.0, 0.0, 0.0, 0.0};
        for (const Cell& c : cells) {
            const double loglam = th[0] + th[1] * c.x_success + th[2] * c.x_trust + th[3] * c.y;
            const double r = c.sum_d - c.sum_e * std::exp(loglam);
            g[0] += r;
            g[1] += r * c.x_success;
            g[2] += r * c.x_trust;
            g[3] += r * c.y;
        }
    }

    void neg_hessian(std::span<const double> th, double h[4][4]) const {
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) h[i][j] = 0.0;
        }
        for (const Cell& c : cells) {
            const double loglam = th[0] + th[1] * c.x_success + th[2] * c.x_trust + th[3] * c.y;
            const double w = c.sum_e * std::exp(loglam);
            const double u[4] = {1.0, c.x_success, c.x_trust, c.y};
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) h[i][j] += w * u[i] * u[j];
            }
        }
    }
};

double log_prior(const std::array<Prior, 4>& priors, std::span<const double> th) {
    double lp = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (priors[k].flat()) continue;
        const double z = (th[k] - priors[k].mean) / priors[k].sd;
        lp -= 0.5 * z * z;
    }
    return lp;
}

void validate_config(const FitConfig& config) {
    if (config.chains < 2) throw ConfigError("fit needs at least 2 chains");
    if (config.draws < 1) throw ConfigError("draws must be >= 1");
    if (config.warmup < 0) throw ConfigError("warmup must be >= 0");
    if (!(config.target_accept > 0.0 && config.target_accept < 1.0)) {
        throw ConfigError("target acceptance rate must be in (0,1)");
    }
    for (const Prior& p : config.priors) {
        if (!(p.sd > 0.0)) throw ConfigError("prior sd must be > 0");
    }
}

int resolve_threads(int requested, int chains) {
    int n = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("HAZARDLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::min(n, chains);
}

// Cholesky factorization of a 4x4 SPD matrix; false if not positive definite.
bool cholesky4(double a[4][4]) {
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                a[i][i] = std::sqrt(s);
            } else {
                a[i][j] = s / a[j][j];
            }
        }
    }
    return true;
}

void solve_cholesky4(const double l[4][4], const std::array<double, 4>& b,
                     std::array<double, 4>& x) {
    std::array<double, 4> y{};
    for (int i = 0; i < 4; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    for (int i = 3; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < 4; ++k) s -= l[k][i] * x[k];
        x[i] = s / l[i][i];
    }
}

} // namespace

ChainDraws run_chain(const LogDensity& log_target, std::vector<double> init, Rng rng,
                     const SamplerOptions& options) {
    if (options.draws < 1) throw ConfigError("sampler draws must be >= 1");
    if (options.warmup < 0) throw ConfigError("sampler warmup must be >= 0");
    const std::size_t dim = init.size();
    std::vector<double> x = std::move(init);
    double lp = log_target(x);
    if (!std::isfinite(lp)) throw DataError("non-finite log target at chain start");

    double log_step = std::log(2.38 / std::sqrt(static_cast<double>(dim)));
    std::vector<double> scale(dim, 1.0);
    std::vector<double> run_mean(dim, 0.0), run_m2(dim, 0.0);
    long n_seen = 0;

    ChainDraws result;
    result.draws.reserve(static_cast<std::size_t>(options.draws));
    std::vector<double> proposal(dim);
    long accepted_sampling = 0;

    const long total = static_cast<long>(options.warmup) + options.draws;
    for (long iter = 0; iter < total; ++iter) {
        const bool warming = iter < options.warmup;
        const double step = std::exp(log_step);
        for (std::size_t k = 0; k < dim; ++k) {
            proposal[k] = x[k] + step * scale[k] * rng.normal();
        }
        const double lp_new = log_target(proposal);
        const double alpha = lp_new >= lp ? 1.0 : std::exp(lp_new - lp);
        if (rng.uniform() < alpha) {
            x = proposal;
            lp = lp_new;
            if (!warming) ++accepted_sampling;
        }

        if (warming) {
            // Robbins-Monro on the global step toward the target rate.
            const double gamma = std::pow(static_cast<double>(iter + 1), -0.6);
            log_step += gamma * (alpha - options.target_accept);
            log_step = std::clamp(log_step, -12.0, 6.0);

            ++n_seen;
            for (std::size_t k = 0; k < dim; ++k) {
                const double delta = x[k] - run_mean[k];
                run_mean[k] += delta / static_cast<double>(n_seen);
                run_m2[k] += delta * (x[k] - run_mean[k]);
            }
            if (n_seen >= 100) {
                for (std::size_t k = 0; k < dim; ++k) {
                    const double var = run_m2[k] / static_cast<double>(n_seen - 1);
                    scale[k] = std::sqrt(std::max(var, 1e-12));
                }
            }
        } else {
            result.draws.push_back(x);
        }
    }
    result.acceptance_rate =
        static_cast<double>(accepted_sampling) / static_cast<double>(options.draws);
    return result;
}

PosteriorChains fit(const IntervalTable& table, const FitConfig& config) {
    validate_config(config);
    const CompressedTable compressed(table);
    if (compressed.n_rated == 0) throw DataError("zero rated episodes in interval table");

    const auto priors = config.priors;
    const LogDensity target = [&compressed, priors](std::span<const double> th) {
        const double ll = compressed.loglik(th);
        return ll == kNegInf ? kNegInf : ll + log_prior(priors, th);
    };

    SamplerOptions options;
    options.draws = config.draws;
    options.warmup = config.warmup;
    options.target_accept = config.target_accept;

    PosteriorChains posterior;
    posterior.chains.resize(static_cast<std::size_t>(config.chains));

    auto run_one = [&](int c) {
        const std::uint64_t chain_seed = derive_seed(config.seed, static_cast<std::uint64_t>(c));
        Rng rng(chain_seed);
        std::vector<double> init(4);
        bool ok = false;
        for (int attempt = 0; attempt < config.max_init_retries; ++attempt) {
            for (int k = 0; k < 4; ++k) {
                init[static_cast<std::size_t>(k)] =
                    priors[static_cast<std::size_t>(k)].flat()
                        ? rng.normal()
                        : rng.normal(priors[static_cast<std::size_t>(k)].mean,
                                     priors[static_cast<std::size_t>(k)].sd);
            }
            if (std::isfinite(target(init))) {
                ok = true;
                break;
            }
        }
        if (!ok) throw DataError("could not find a finite-posterior chain start");

        ChainDraws raw = run_chain(target, init, rng, options);
        Chain& chain = posterior.chains[static_cast<std::size_t>(c)];
        chain.seed = chain_seed;
        chain.acceptance_rate = raw.acceptance_rate;
        chain.draws.reserve(raw.draws.size());
        for (const auto& d : raw.draws) {
            chain.draws.push_back({d[0], d[1], d[2], d[3]});
        }
    };

    const int n_threads = resolve_threads(config.threads, config.chains);
    if (n_threads <= 1) {
        for (int c = 0; c < config.chains; ++c) run_one(c);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    const int c = next.fetch_add(1);
                    if (c >= config.chains) return;
                    try {
                        run_one(c);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
        if (error) std::rethrow_exception(error);
    }
    return posterior;
}

std::vector<double> PosteriorChains::pooled(int param) const {
    std::vector<double> out;
    out.reserve(chains.size() * draws_per_chain());
    for (const Chain& chain : chains) {
        for (const auto& d : chain.draws) out.push_back(d[static_cast<std::size_t>(param)]);
    }
    return out;
}

RhatResult split_rhat(const std::vector<std::vector<double>>& chains) {
    if (chains.size() < 2) throw DataError("split_rhat needs at least 2 chains");
    std::vector<double> half_means, half_vars;
    for (const auto& chain : chains) {
        const std::size_t n = chain.size();
        if (n < 4) throw DataError("split_rhat needs at least 4 draws per chain");
        const std::size_t m = n / 2;
        const auto half_stats = [&](std::size_t begin) {
            double mean = 0.0;
            for (std::size_t i = 0; i < m; ++i) mean += chain[begin + i];
            mean /= static_cast<double>(m);
            double var = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = chain[begin + i] - mean;
                var += d * d;
            }
            var /= static_cast<double>(m - 1);
            half_means.push_back(mean);
            half_vars.push_back(var);
        };
        half_stats(0);
        half_stats(n - m);
    }
    const double w = stats::mean(half_vars);
    if (w == 0.0) return {std::numeric_limits<double>::quiet_NaN(), true};
    const double n_half = std::floor(static_cast<double>(chains[0].size()) / 2.0);
    const double b_over_n = [&] {
        const double grand = stats::mean(half_means);
        double var = 0.0;
        for (double m : half_means) var += (m - grand) * (m - grand);
        return var / static_cast<double>(half_means.size() - 1);
    }();
    const double var_plus = (n_half - 1.0) / n_half * w + b_over_n;
    return {std::sqrt(var_plus / w), false};
}

RhatResult split_rhat(const PosteriorChains& chains, int param) {
    std::vector<std::vector<double>> series;
    series.reserve(chains.chains.size());
    for (const Chain& chain : chains.chains) {
        std::vector<double> v;
        v.reserve(chain.draws.size());
        for (const auto& d : chain.draws) v.push_back(d[static_cast<std::size_t>(param)]);
        series.push_back(std::move(v));
    }
    return split_rhat(series);
}

namespace {
ParamStats make_stats(const std::string& name, const std::vector<std::vector<double>>& chains,
                      double mass) {
    ParamStats s;
    s.name = name;
    std::vector<double> pooled;
    for (const auto& chain : chains) pooled.insert(pooled.end(), chain.begin(), chain.end());
    s.mean = stats::mean(pooled);
    s.sd = pooled.size() > 1 ? stats::sample_sd(pooled) : 0.0;
    const double tail = 0.5 * (1.0 - mass);
    std::sort(pooled.begin(), pooled.end());
    s.q_low = stats::quantile_sorted(pooled, tail);
    s.q_high = stats::quantile_sorted(pooled, 1.0 - tail);
    s.rhat = split_rhat(chains);
    return s;
}
} // namespace

ParamSummary summarize(const PosteriorChains& chains) {
    if (chains.chains.empty()) throw DataError("summarize: no chains");
    ParamSummary summary;
    for (int k = 0; k < 4; ++k) {
        std::vector<std::vector<double>> series;
        for (const Chain& chain : chains.chains) {
            std::vector<double> v;
            v.reserve(chain.draws.size());
            for (const auto& d : chain.draws) v.push_back(d[static_cast<std::size_t>(k)]);
            series.push_back(std::move(v));
        }
        summary.params.push_back(make_stats(kParamNames[static_cast<std::size_t>(k)], series,
                                            summary.interval_mass));
        if (k == 0) {
            for (auto& chain : series) {
                for (double& v : chain) v = std::exp(v);
            }
            summary.params.push_back(make_stats("lambda0", series, summary.interval_mass));
        }
    }
    return summary;
}

double log_posterior(const HazardParams& params, const IntervalTable& table,
                     const std::array<Prior, 4>& priors) {
    const double ll = log_likelihood(params, table);
    const auto th = params.as_array();
    return ll + log_prior(priors, th);
}

HazardParams map_estimate(const IntervalTable& table, const FitConfig& config, double grad_tol,
                          int max_iter) {
    validate_config(config);
    const CompressedTable compressed(table);
    if (compressed.n_rated == 0) throw DataError("zero rated episodes in interval table");

    std::array<double, 4> x{};
    for (int k = 0; k < 4; ++k) {
        x[static_cast<std::size_t>(k)] =
            config.priors[static_cast<std::size_t>(k)].flat()
                ? 0.0
                : config.priors[static_cast<std::size_t>(k)].mean;
    }

    const auto objective = [&](const std::array<double, 4>& th) {
        const double ll = compressed.loglik(th);
        return ll == kNegInf ? kNegInf : ll + log_prior(config.priors, th);
    };
    const auto gradient = [&](const std::array<double, 4>& th, std::array<double, 4>& g) {
        compressed.grad(th, g);
        for (int k = 0; k < 4; ++k) {
            const Prior& p = config.priors[static_cast<std::size_t>(k)];
            if (!p.flat()) {
                g[static_cast<std::size_t>(k)] -=
                    (th[static_cast<std::size_t>(k)] - p.mean) / (p.sd * p.sd);
            }
        }
    };
    const auto max_norm = [](const std::array<double, 4>& g) {
        double m = 0.0;
        for (double v : g) m = std::max(m, std::fabs(v));
        return m;
    };

    double fx = objective(x);
    if (!std::isfinite(fx)) throw DataError("non-finite posterior at map_estimate start");

    for (int iter = 0; iter < max_iter; ++iter) {
        std::array<double, 4> g{};
        gradient(x, g);
        const double gmax = max_norm(g);
        if (gmax < grad_tol) return HazardParams::from_array(x);

        double h[4][4];
        compressed.neg_hessian(x, h);
        for (int k = 0; k < 4; ++k) {
            const Prior& p = config.priors[static_cast<std::size_t>(k)];
            if (!p.flat()) h[k][k] += 1.0 / (p.sd * p.sd);
        }

        std::array<double, 4> dir{};
        double ridge = 0.0;
        while (true) {
            double a[4][4];
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) a[i][j] = h[i][j];
                a[i][i] += ridge;
            }
            if (cholesky4(a)) {
                solve_cholesky4(a, g, dir);
                break;
            }
            ridge = ridge == 0.0 ? 1e-8 : ridge * 100.0;
            if (ridge > 1e12) throw DataError("map_estimate: Hessian factorization failed");
        }

        double slope = 0.0;
        for (int k = 0; k < 4; ++k) slope += g[static_cast<std::size_t>(k)] * dir[static_cast<std::size_t>(k)];
        if (slope <= 0.0) {
            dir = g; // fall back to steepest ascent
            slope = 0.0;
            for (double v : g) slope += v * v;
        }

        // Full Newton step first, judged on gradient reduction: near the
        // optimum the objective change is below double granularity, so an
        // Armijo test on f alone cannot see the quadratic endgame.
        bool moved = false;
        {
            std::array<double, 4> trial;
            for (int k = 0; k < 4; ++k) {
                trial[static_cast<std::size_t>(k)] =
                    x[static_cast<std::size_t>(k)] + dir[static_cast<std::size_t>(k)];
            }
            const double ft = objective(trial);
            if (std::isfinite(ft)) {
                std::array<double, 4> g_trial{};
                gradient(trial, g_trial);
                if (max_norm(g_trial) < 0.5 * gmax) {
                    x = trial;
                    fx = ft;
                    moved = true;
                }
            }
        }

        double step = 1.0;
        for (int back = 0; !moved && back < 60; ++back) {
            std::array<double, 4> trial;
            for (int k = 0; k < 4; ++k) {
                trial[static_cast<std::size_t>(k)] =
                    x[static_cast<std::size_t>(k)] + step * dir[static_cast<std::size_t>(k)];
            }
            const double ft = objective(trial);
            if (ft >= fx + 1e-4 * step * slope && std::isfinite(ft)) {
                x = trial;
                fx = ft;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) throw DataError("map_estimate: line search failed");
    }
    throw DataError("map_estimate did not converge within the iteration budget");
}

void write_posterior_csv(std::ostream& out, const PosteriorChains& chains) {
    csv::Writer w(out);
    w.header({"chain", "draw", "log_lambda0", "beta_success", "beta_trust", "eta"});
    for (std::size_t c = 0; c < chains.chains.size(); ++c) {
        const Chain& chain = chains.chains[c];
        for (std::size_t i = 0; i < chain.draws.size(); ++i) {
            const auto& d = chain.draws[i];
            w.row({c, i, d[0], d[1], d[2], d[3]});
        }
    }
}

void write_summary_csv(std::ostream& out, const ParamSummary& summary) {
    csv::Writer w(out);
    w.header({"parameter", "mean", "sd", "hdi_low", "hdi_high", "r_hat"});
    for (const ParamStats& p : summary.params) {
        w.row({p.name, p.mean, p.sd, p.q_low, p.q_high,
               p.rhat.degenerate ? csv::Cell::empty() : csv::Cell(p.rhat.value)});
    }
}

PosteriorChains read_posterior_csv(std::istream& in) {
    const csv::Table table = csv::read(in);
    const int c_chain = table.column("chain");
    const int c_ll = table.column("log_lambda0");
    const int c_bs = table.column("beta_success");
    const int c_bt = table.column("beta_trust");
    const int c_eta = table.column("eta");
    if (c_chain < 0 || c_ll < 0 || c_bs < 0 || c_bt < 0 || c_eta < 0) {
        throw DataError("posterior csv is missing required columns");
    }
    std::map<long, Chain> by_chain;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto chain_id = static_cast<long>(table.number(r, c_chain));
        by_chain[chain_id].draws.push_back({table.number(r, c_ll), table.number(r, c_bs),
                                            table.number(r, c_bt), table.number(r, c_eta)});
    }
    PosteriorChains out;
    for (auto& [id, chain] : by_chain) out.chains.push_back(std::move(chain));
    if (out.chains.empty()) throw DataError("posterior csv has no draws");
    return out;
}

} // namespace hazardlab
