#include "hazardlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"
#include "hazardlab/stats.hpp"

namespace hazardlab {

BoxStats box_stats(std::vector<double> values) {
    BoxStats s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.mean = stats::mean(values);
    s.sd = values.size() > 1 ? stats::sample_sd(values) : 0.0;
    s.q1 = stats::quantile_sorted(values, 0.25);
    s.median = stats::quantile_sorted(values, 0.5);
    s.q3 = stats::quantile_sorted(values, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    // Extreme data within the fences; never inside the box itself (the
    // interpolated quartiles need not coincide with data points).
    s.whisker_low = s.q1;
    for (double v : values) {
        if (v >= lo_fence) {
            s.whisker_low = std::min(v, s.q1);
            break;
        }
    }
    s.whisker_high = s.q3;
    for (double v : values) {
        if (v <= hi_fence) s.whisker_high = std::max(s.q3, v);
    }
    return s;
}

TrustChangeSummary trust_change_by_algorithm(std::span<const GraspEpisode> episodes) {
    std::vector<double> gamma, echo;
    for (const GraspEpisode& ep : episodes) {
        if (!ep.trust_change) continue;
        (ep.algorithm == Algorithm::gamma ? gamma : echo).push_back(*ep.trust_change);
    }
    return {box_stats(std::move(gamma)), box_stats(std::move(echo))};
}

TTestResult paired_t_test(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 2) throw DataError("paired t-test needs at least 2 pairs");
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [a, b] : pairs) diffs.push_back(a - b);

    TTestResult r;
    r.n_pairs = pairs.size();
    r.degrees_of_freedom = pairs.size() - 1;
    r.mean_diff = stats::mean(diffs);
    const double sd = stats::sample_sd(diffs);
    if (sd == 0.0) {
        r.degenerate = true;
        r.t_statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.t_statistic = r.mean_diff / (sd / std::sqrt(static_cast<double>(r.n_pairs)));
    r.p_value = stats::student_t_two_sided_p(r.t_statistic,
                                             static_cast<double>(r.degrees_of_freedom));
    return r;
}

std::vector<std::pair<double, double>> per_subject_change_pairs(
    std::span<const GraspEpisode> episodes, std::vector<std::string>* warnings) {
    struct Acc {
        double sum_gamma = 0.0;
        std::size_t n_gamma = 0;
        double sum_echo = 0.0;
        std::size_t n_echo = 0;
    };
    std::map<std::string, Acc> by_subject;
    for (const GraspEpisode& ep : episodes) {
        if (!ep.trust_change) continue;
        Acc& acc = by_subject[ep.subject];
        if (ep.algorithm == Algorithm::gamma) {
            acc.sum_gamma += *ep.trust_change;
            ++acc.n_gamma;
        } else {
            acc.sum_echo += *ep.trust_change;
            ++acc.n_echo;
        }
    }
    std::vector<std::pair<double, double>> pairs;
    for (const auto& [subject, acc] : by_subject) {
        if (acc.n_gamma == 0 || acc.n_echo == 0) {
            if (warnings) {
                warnings->push_back("subject '" + subject +
                                    "' lacks rated grasps under both algorithms; unpaired");
            }
            continue;
        }
        pairs.emplace_back(acc.sum_gamma / static_cast<double>(acc.n_gamma),
                           acc.sum_echo / static_cast<double>(acc.n_echo));
    }
    return pairs;
}

Histogram make_histogram(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be > 0");
    Histogram h;
    if (values.empty()) return h;
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo = std::floor(*min_it / bin_width) * bin_width;
    auto n_bins = static_cast<std::size_t>(std::ceil((*max_it - lo) / bin_width));
    if (n_bins == 0) n_bins = 1;
    h.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        h.edges[i] = lo + static_cast<double>(i) * bin_width;
    }
    h.counts.assign(n_bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / bin_width);
        if (idx >= n_bins) idx = n_bins - 1; // right edge of the last bin is closed
        ++h.counts[idx];
    }
    h.total = values.size();
    return h;
}

Histogram rating_distribution_by_grasp(std::span<const GraspEpisode> episodes) {
    Histogram h;
    h.edges = {0.5, 1.5, 2.5, 3.5, 4.5};
    h.counts.assign(4, 0);
    for (const GraspEpisode& ep : episodes) {
        if (!ep.tRT) continue;
        if (ep.grasp_number >= 1 && ep.grasp_number <= 4) {
            ++h.counts[static_cast<std::size_t>(ep.grasp_number - 1)];
            ++h.total;
        }
    }
    return h;
}

std::pair<Histogram, Histogram> rating_time_histograms(std::span<const GraspEpisode> episodes,
                                                       double bin_width, TimeCenter center) {
    if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be > 0");
    std::vector<double> early, final_grasp;
    for (const GraspEpisode& ep : episodes) {
        if (!ep.tRT) continue;
        const double t = center == TimeCenter::pick ? *ep.tRT : *ep.tRT - ep.t_place;
        (ep.is_final ? final_grasp : early).push_back(t);
    }
    return {make_histogram(early, bin_width), make_histogram(final_grasp, bin_width)};
}

namespace {
void box_row(csv::Writer& w, const char* name, const BoxStats& s) {
    if (s.empty()) {
        w.row({name, std::size_t{0}, "", "", "", "", "", "", ""});
        return;
    }
    w.row({name, s.count, s.mean, s.sd, s.q1, s.median, s.q3, s.whisker_low, s.whisker_high});
}
} // namespace

void write_trust_change_csv(std::ostream& out, const TrustChangeSummary& summary) {
    csv::Writer w(out);
    w.header({"algorithm", "count", "mean", "sd", "q1", "median", "q3", "whisker_low",
              "whisker_high"});
    box_row(w, "gamma", summary.gamma);
    box_row(w, "echo", summary.echo);
}

void write_t_test_csv(std::ostream& out, const TTestResult& r) {
    csv::Writer w(out);
    w.header({"n_pairs", "mean_diff", "t_statistic", "degrees_of_freedom", "p_value",
              "degenerate"});
    w.row({r.n_pairs, r.mean_diff, r.t_statistic, r.degrees_of_freedom, r.p_value,
           r.degenerate ? "true" : "false"});
}

void write_grasp_distribution_csv(std::ostream& out, const Histogram& h) {
    csv::Writer w(out);
    w.header({"grasp", "count"});
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        w.row({i + 1, h.counts[i]});
    }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    csv::Writer w(out);
    w.header({"bin_start", "bin_end", "count"});
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        w.row({h.edges[i], h.edges[i + 1], h.counts[i]});
    }
}

} // namespace hazardlab
