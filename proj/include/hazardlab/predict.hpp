#ifndef HAZARDLAB_PREDICT_HPP
#define HAZARDLAB_PREDICT_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hazardlab/hazard.hpp"
#include "hazardlab/inference.hpp"

namespace hazardlab {

struct SurvivalCurve {
    std::string provenance; // e.g. "draw:12/row:4", "empirical"
    std::vector<double> values;
};

struct PredictionBand {
    std::vector<double> q05;
    std::vector<double> q50;
    std::vector<double> q95;
};

struct PosteriorCurves {
    std::vector<double> grid;
    std::vector<SurvivalCurve> curves; // one per (sampled draw, covariate row)
    PredictionBand band;               // pointwise quantiles across the curves
};

/// Uniform grid start..stop inclusive (stop rounded up to a whole step).
std::vector<double> uniform_grid(double start, double stop, double step);

/// Survival curves for `n_draws` seeded posterior draws crossed with the
/// given covariate rows, plus a pointwise 5/50/95% band across all curves.
PosteriorCurves posterior_survival_curves(const PosteriorChains& chains,
                                          std::span<const CovariateRow> rows,
                                          std::vector<double> grid, int n_draws,
                                          std::uint64_t seed);

/// Complement of the ECDF: S(t) = #(tRT > t) / n, right-continuous. An
/// empty sample yields the constant 1 with a warning.
SurvivalCurve empirical_survival(std::span<const double> rating_times,
                                 std::span<const double> grid,
                                 std::vector<std::string>* warnings = nullptr);

void write_curves_csv(std::ostream& out, const PosteriorCurves& curves,
                      std::size_t max_curves);
void write_band_csv(std::ostream& out, const PosteriorCurves& curves,
                    const SurvivalCurve& empirical);

} // namespace hazardlab

#endif
