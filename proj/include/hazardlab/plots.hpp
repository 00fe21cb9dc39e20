#ifndef HAZARDLAB_PLOTS_HPP
#define HAZARDLAB_PLOTS_HPP

#include <string>

#include "hazardlab/csv.hpp"

namespace hazardlab {

/// Figures rendered straight from the exported CSV tables so the plotted
/// numbers are exactly the published ones. Tables may be empty, in which
/// case a "no data" annotation is drawn.

void plot_trust_change_box(const csv::Table& summary, const std::string& path);
void plot_grasp_distribution(const csv::Table& distribution, const std::string& path);
void plot_rating_time_histograms(const csv::Table& early, const csv::Table& final_grasp,
                                 const std::string& path);
void plot_survival_overlay(const csv::Table& band, const csv::Table& curves,
                           const std::string& path);

} // namespace hazardlab

#endif
