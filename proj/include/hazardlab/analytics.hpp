#ifndef HAZARDLAB_ANALYTICS_HPP
#define HAZARDLAB_ANALYTICS_HPP

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "hazardlab/events.hpp"

namespace hazardlab {

/// Box statistics over per-grasp trust changes for one algorithm.
struct BoxStats {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;  // lowest datum within 1.5*IQR of q1
    double whisker_high = 0.0; // highest datum within 1.5*IQR of q3
    bool empty() const { return count == 0; }
};

struct TrustChangeSummary {
    BoxStats gamma;
    BoxStats echo;
};

struct TTestResult {
    std::size_t n_pairs = 0;
    double mean_diff = 0.0;
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    bool degenerate = false; // zero variance of differences
};

struct Histogram {
    std::vector<double> edges; // uniform, strictly increasing; empty if no data
    std::vector<std::size_t> counts;
    std::size_t total = 0;
};

enum class TimeCenter { pick, place };

/// Box statistics per algorithm over episodes that carry a trust change.
TrustChangeSummary trust_change_by_algorithm(std::span<const GraspEpisode> episodes);

BoxStats box_stats(std::vector<double> values);

/// Classic paired t: d_i = a_i - b_i, two-sided p via the regularized
/// incomplete beta. Zero-variance differences yield a degenerate flag.
TTestResult paired_t_test(std::span<const std::pair<double, double>> pairs);

/// Per-subject (gamma mean change, echo mean change) pairs; subjects with
/// rated grasps under only one algorithm are skipped.
std::vector<std::pair<double, double>> per_subject_change_pairs(
    std::span<const GraspEpisode> episodes, std::vector<std::string>* warnings = nullptr);

/// Counts of rated episodes per grasp number 1..4.
Histogram rating_distribution_by_grasp(std::span<const GraspEpisode> episodes);

/// Rating-time histograms for the non-final and final cohorts, with tRT
/// shifted to the chosen time origin.
std::pair<Histogram, Histogram> rating_time_histograms(std::span<const GraspEpisode> episodes,
                                                       double bin_width, TimeCenter center);

Histogram make_histogram(std::span<const double> values, double bin_width);

void write_trust_change_csv(std::ostream& out, const TrustChangeSummary& summary);
void write_t_test_csv(std::ostream& out, const TTestResult& result);
void write_grasp_distribution_csv(std::ostream& out, const Histogram& h);
void write_histogram_csv(std::ostream& out, const Histogram& h);

} // namespace hazardlab

#endif
