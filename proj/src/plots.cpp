#include "hazardlab/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "hazardlab/errors.hpp"
#include "hazardlab/svg.hpp"

namespace hazardlab {

namespace {

constexpr double kWidth = 560.0;
constexpr double kHeight = 360.0;
const char* kGammaColor = "#4878cf";
const char* kEchoColor = "#d65f5f";

void no_data(svg::Document& doc, const std::string& title) {
    doc.text(kWidth / 2, 22, title, 13, "middle");
    doc.text(kWidth / 2, kHeight / 2, "no data", 14, "middle");
}

struct BoxRow {
    double q1, median, q3, whisker_low, whisker_high;
    std::size_t count;
};

void draw_box(svg::Frame& frame, double x_center, double half_width, const BoxRow& b,
              const char* color) {
    svg::Document& doc = frame.doc();
    const double x0 = frame.px(x_center - half_width);
    const double x1 = frame.px(x_center + half_width);
    const double xc = frame.px(x_center);
    doc.line(xc, frame.py(b.whisker_low), xc, frame.py(b.q1), "black");
    doc.line(xc, frame.py(b.q3), xc, frame.py(b.whisker_high), "black");
    doc.line(xc - 8, frame.py(b.whisker_low), xc + 8, frame.py(b.whisker_low), "black");
    doc.line(xc - 8, frame.py(b.whisker_high), xc + 8, frame.py(b.whisker_high), "black");
    doc.rect(x0, frame.py(b.q3), x1 - x0, frame.py(b.q1) - frame.py(b.q3), color, "black", 0.75);
    doc.line(x0, frame.py(b.median), x1, frame.py(b.median), "black", 2.0);
}

} // namespace

void plot_trust_change_box(const csv::Table& summary, const std::string& path) {
    svg::Document doc(kWidth, kHeight);
    const int c_alg = summary.column("algorithm");
    const int c_count = summary.column("count");
    std::map<std::string, BoxRow> boxes;
    for (std::size_t r = 0; r < summary.rows.size(); ++r) {
        if (summary.number(r, c_count) == 0) continue;
        BoxRow b{};
        b.q1 = summary.number(r, summary.column("q1"));
        b.median = summary.number(r, summary.column("median"));
        b.q3 = summary.number(r, summary.column("q3"));
        b.whisker_low = summary.number(r, summary.column("whisker_low"));
        b.whisker_high = summary.number(r, summary.column("whisker_high"));
        b.count = static_cast<std::size_t>(summary.number(r, c_count));
        boxes[summary.rows[r][static_cast<std::size_t>(c_alg)]] = b;
    }
    if (boxes.empty()) {
        no_data(doc, "Trust change by algorithm");
        doc.write_file(path);
        return;
    }
    double lo = 0.0, hi = 0.0;
    for (const auto& [name, b] : boxes) {
        lo = std::min(lo, b.whisker_low);
        hi = std::max(hi, b.whisker_high);
    }
    const auto [y0, y1] = svg::padded_range(lo, hi);
    svg::Frame frame(doc, 0.0, 2.0, y0, y1);
    frame.axes("Trust change by algorithm", "", "trust change (slider units)");
    doc.line(frame.px(0.0), frame.py(0.0), frame.px(2.0), frame.py(0.0), "#999999", 1.0, "4 3");
    double x = 0.5;
    for (const auto& [name, b] : boxes) {
        const char* color = name == "gamma" ? kGammaColor : kEchoColor;
        draw_box(frame, x, 0.16, b, color);
        doc.text(frame.px(x), frame.py(y0) + 30, name + " (n=" + std::to_string(b.count) + ")",
                 11, "middle");
        x += 1.0;
    }
    doc.write_file(path);
}

void plot_grasp_distribution(const csv::Table& distribution, const std::string& path) {
    svg::Document doc(kWidth, kHeight);
    const int c_grasp = distribution.column("grasp");
    const int c_count = distribution.column("count");
    if (distribution.rows.empty() || c_grasp < 0 || c_count < 0) {
        no_data(doc, "Trust ratings by grasp number");
        doc.write_file(path);
        return;
    }
    double max_count = 0.0;
    for (std::size_t r = 0; r < distribution.rows.size(); ++r) {
        max_count = std::max(max_count, distribution.number(r, c_count));
    }
    svg::Frame frame(doc, 0.5, distribution.rows.size() + 0.5, 0.0,
                     max_count > 0 ? max_count * 1.08 : 1.0);
    frame.axes("Trust ratings by grasp number", "grasp number", "rated grasps");
    for (std::size_t r = 0; r < distribution.rows.size(); ++r) {
        const double g = distribution.number(r, c_grasp);
        const double count = distribution.number(r, c_count);
        const double x0 = frame.px(g - 0.35);
        const double x1 = frame.px(g + 0.35);
        doc.rect(x0, frame.py(count), x1 - x0, frame.py(0.0) - frame.py(count), kGammaColor,
                 "black", 0.85);
    }
    doc.write_file(path);
}

namespace {

struct HistBars {
    std::vector<std::array<double, 3>> bins; // start, end, count
    double x_lo = 0.0, x_hi = 0.0, max_count = 0.0;
};

HistBars hist_bars(const csv::Table& t) {
    HistBars h;
    const int c_start = t.column("bin_start");
    const int c_end = t.column("bin_end");
    const int c_count = t.column("count");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double a = t.number(r, c_start);
        const double b = t.number(r, c_end);
        const double n = t.number(r, c_count);
        h.bins.push_back({a, b, n});
        if (h.bins.size() == 1) {
            h.x_lo = a;
            h.x_hi = b;
        } else {
            h.x_lo = std::min(h.x_lo, a);
            h.x_hi = std::max(h.x_hi, b);
        }
        h.max_count = std::max(h.max_count, n);
    }
    return h;
}

void draw_hist(svg::Frame& frame, const HistBars& h, const char* color) {
    for (const auto& [a, b, n] : h.bins) {
        if (n <= 0) continue;
        frame.doc().rect(frame.px(a), frame.py(n), frame.px(b) - frame.px(a),
                         frame.py(0.0) - frame.py(n), color, "none", 0.55);
    }
}

} // namespace

void plot_rating_time_histograms(const csv::Table& early, const csv::Table& final_grasp,
                                 const std::string& path) {
    svg::Document doc(kWidth, kHeight);
    const HistBars he = hist_bars(early);
    const HistBars hf = hist_bars(final_grasp);
    if (he.bins.empty() && hf.bins.empty()) {
        no_data(doc, "Trust rating times (place-centered)");
        doc.write_file(path);
        return;
    }
    double x_lo = he.bins.empty() ? hf.x_lo : he.x_lo;
    double x_hi = he.bins.empty() ? hf.x_hi : he.x_hi;
    if (!hf.bins.empty()) {
        x_lo = std::min(x_lo, hf.x_lo);
        x_hi = std::max(x_hi, hf.x_hi);
    }
    const double y_hi = std::max(he.max_count, hf.max_count) * 1.08;
    svg::Frame frame(doc, x_lo, x_hi, 0.0, y_hi > 0 ? y_hi : 1.0);
    frame.axes("Trust rating times (place-centered)", "seconds since placement", "ratings");
    draw_hist(frame, he, kGammaColor);
    draw_hist(frame, hf, kEchoColor);
    if (x_lo < 0.0 && x_hi > 0.0) {
        doc.line(frame.px(0.0), frame.py(0.0), frame.px(0.0), frame.py(y_hi > 0 ? y_hi : 1.0),
                 "#555555", 1.0, "4 3");
    }
    doc.rect(kWidth - 170, 40, 12, 12, kGammaColor, "none", 0.55);
    doc.text(kWidth - 152, 50, "grasps 1-3", 11);
    doc.rect(kWidth - 170, 58, 12, 12, kEchoColor, "none", 0.55);
    doc.text(kWidth - 152, 68, "final grasp", 11);
    doc.write_file(path);
}

void plot_survival_overlay(const csv::Table& band, const csv::Table& curves,
                           const std::string& path) {
    svg::Document doc(kWidth, kHeight);
    const int c_t = band.column("t");
    if (band.rows.empty() || c_t < 0) {
        no_data(doc, "Predicted vs empirical survival");
        doc.write_file(path);
        return;
    }
    const int c_q05 = band.column("q05");
    const int c_q50 = band.column("q50");
    const int c_q95 = band.column("q95");
    const int c_emp = band.column("empirical");
    const double t_max = band.number(band.rows.size() - 1, c_t);

    svg::Frame frame(doc, 0.0, t_max, 0.0, 1.02);
    frame.axes("Predicted vs empirical survival", "seconds since pick", "S(t)");

    // Posterior curves, thin and translucent.
    if (!curves.rows.empty()) {
        const int k_id = curves.column("curve_id");
        const int k_t = curves.column("t");
        const int k_v = curves.column("value");
        std::vector<std::pair<double, double>> pts;
        std::string current;
        for (std::size_t r = 0; r < curves.rows.size(); ++r) {
            const std::string& id = curves.rows[r][static_cast<std::size_t>(k_id)];
            if (id != current && !pts.empty()) {
                doc.polyline(pts, kGammaColor, 0.7, 0.18);
                pts.clear();
            }
            current = id;
            pts.emplace_back(frame.px(curves.number(r, k_t)), frame.py(curves.number(r, k_v)));
        }
        if (!pts.empty()) doc.polyline(pts, kGammaColor, 0.7, 0.18);
    }

    // 5-95% band as a filled polygon.
    std::vector<std::pair<double, double>> poly;
    for (std::size_t r = 0; r < band.rows.size(); ++r) {
        poly.emplace_back(frame.px(band.number(r, c_t)), frame.py(band.number(r, c_q95)));
    }
    for (std::size_t r = band.rows.size(); r-- > 0;) {
        poly.emplace_back(frame.px(band.number(r, c_t)), frame.py(band.number(r, c_q05)));
    }
    doc.polygon(poly, kGammaColor, 0.25);

    std::vector<std::pair<double, double>> median_pts, emp_pts;
    for (std::size_t r = 0; r < band.rows.size(); ++r) {
        median_pts.emplace_back(frame.px(band.number(r, c_t)), frame.py(band.number(r, c_q50)));
        emp_pts.emplace_back(frame.px(band.number(r, c_t)), frame.py(band.number(r, c_emp)));
    }
    doc.polyline(median_pts, kGammaColor, 1.6);
    doc.polyline(emp_pts, "#222222", 1.8);

    doc.line(kWidth - 180, 44, kWidth - 150, 44, kGammaColor, 1.6);
    doc.text(kWidth - 144, 48, "posterior median", 11);
    doc.line(kWidth - 180, 62, kWidth - 150, 62, "#222222", 1.8);
    doc.text(kWidth - 144, 66, "empirical", 11);
    doc.write_file(path);
}

} // namespace hazardlab
