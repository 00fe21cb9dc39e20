#include "hazardlab/predict.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"
#include "hazardlab/rng.hpp"
#include "hazardlab/stats.hpp"

namespace hazardlab {

std::vector<double> uniform_grid(double start, double stop, double step) {
    if (!(step > 0.0)) throw ConfigError("grid step must be > 0");
    if (!(stop > start)) throw ConfigError("grid stop must exceed start");
    const auto n = static_cast<std::size_t>(std::ceil((stop - start) / step - 1e-9));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

PosteriorCurves posterior_survival_curves(const PosteriorChains& chains,
                                          std::span<const CovariateRow> rows,
                                          std::vector<double> grid, int n_draws,
                                          std::uint64_t seed) {
    if (rows.empty()) throw DataError("posterior_survival_curves: no covariate rows");
    if (chains.chains.empty() || chains.draws_per_chain() == 0) {
        throw DataError("posterior_survival_curves: empty chains");
    }
    if (grid.empty() || grid.front() != 0.0) {
        throw ConfigError("survival grid must start at 0");
    }

    // Pool draws and pick a seeded subsample without replacement.
    std::vector<HazardParams> pool;
    for (const Chain& chain : chains.chains) {
        for (const auto& d : chain.draws) pool.push_back(HazardParams::from_array(d));
    }
    if (n_draws < 1 || static_cast<std::size_t>(n_draws) > pool.size()) {
        throw ConfigError("n_draws must be in [1, total posterior draws]");
    }
    Rng rng(derive_seed(seed, 0x70726564));
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_draws); ++i) {
        const std::size_t j = i + rng.integer(order.size() - i);
        std::swap(order[i], order[j]);
    }

    PosteriorCurves out;
    out.grid = std::move(grid);
    out.curves.reserve(static_cast<std::size_t>(n_draws) * rows.size());
    for (int di = 0; di < n_draws; ++di) {
        const HazardParams& params = pool[order[static_cast<std::size_t>(di)]];
        for (std::size_t ri = 0; ri < rows.size(); ++ri) {
            SurvivalCurve curve;
            curve.provenance =
                "draw:" + std::to_string(order[static_cast<std::size_t>(di)]) +
                "/row:" + std::to_string(ri);
            curve.values.reserve(out.grid.size());
            for (double t : out.grid) curve.values.push_back(survival(params, rows[ri], t));
            out.curves.push_back(std::move(curve));
        }
    }

    const std::size_t n_points = out.grid.size();
    out.band.q05.resize(n_points);
    out.band.q50.resize(n_points);
    out.band.q95.resize(n_points);
    std::vector<double> column(out.curves.size());
    for (std::size_t g = 0; g < n_points; ++g) {
        for (std::size_t c = 0; c < out.curves.size(); ++c) column[c] = out.curves[c].values[g];
        std::sort(column.begin(), column.end());
        out.band.q05[g] = stats::quantile_sorted(column, 0.05);
        out.band.q50[g] = stats::quantile_sorted(column, 0.50);
        out.band.q95[g] = stats::quantile_sorted(column, 0.95);
    }
    return out;
}

SurvivalCurve empirical_survival(std::span<const double> rating_times,
                                 std::span<const double> grid,
                                 std::vector<std::string>* warnings) {
    SurvivalCurve curve;
    curve.provenance = "empirical";
    curve.values.reserve(grid.size());
    if (rating_times.empty()) {
        if (warnings) warnings->push_back("empirical survival of an empty sample; constant 1");
        curve.values.assign(grid.size(), 1.0);
        return curve;
    }
    std::vector<double> sorted(rating_times.begin(), rating_times.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    for (double t : grid) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        curve.values.push_back(static_cast<double>(above) / n);
    }
    return curve;
}

void write_curves_csv(std::ostream& out, const PosteriorCurves& curves,
                      std::size_t max_curves) {
    csv::Writer w(out);
    w.header({"curve_id", "provenance", "t", "value"});
    const std::size_t n = std::min(max_curves, curves.curves.size());
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t g = 0; g < curves.grid.size(); ++g) {
            w.row({c, curves.curves[c].provenance, curves.grid[g], curves.curves[c].values[g]});
        }
    }
}

void write_band_csv(std::ostream& out, const PosteriorCurves& curves,
                    const SurvivalCurve& empirical) {
    csv::Writer w(out);
    w.header({"t", "q05", "q50", "q95", "empirical"});
    for (std::size_t g = 0; g < curves.grid.size(); ++g) {
        w.row({curves.grid[g], curves.band.q05[g], curves.band.q50[g], curves.band.q95[g],
               empirical.values.at(g)});
    }
}

} // namespace hazardlab
