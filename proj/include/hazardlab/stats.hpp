#ifndef HAZARDLAB_STATS_HPP
#define HAZARDLAB_STATS_HPP

#include <span>
#include <vector>

namespace hazardlab::stats {

double mean(std::span<const double> v);

/// Sample standard deviation (n-1 denominator).
double sample_sd(std::span<const double> v);

/// Median; even counts return the mean of the two central values.
double median(std::vector<double> v);

/// Type-7 quantile (linear interpolation between order statistics).
/// `sorted` must be ascending and nonempty; p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Quantile of an unsorted sample (copies and sorts).
double quantile(std::vector<double> v, double p);

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
/// Continued-fraction evaluation (modified Lentz).
double reg_inc_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

} // namespace hazardlab::stats

#endif
