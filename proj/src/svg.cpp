#include "hazardlab/svg.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hazardlab::svg {

std::string num(double v) {
    if (std::fabs(v) < 1e-9) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                    double stroke_width, const std::string& dash) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
          << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << num(stroke_width) << '"';
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << '"';
    body_ << "/>\n";
}

void Document::rect(double x, double y, double w, double h, const std::string& fill,
                    const std::string& stroke, double opacity) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
          << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke << '"';
    if (opacity < 1.0) body_ << " fill-opacity=\"" << num(opacity) << '"';
    body_ << "/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& points,
                        const std::string& stroke, double stroke_width, double opacity) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << num(stroke_width) << '"';
    if (opacity < 1.0) body_ << " stroke-opacity=\"" << num(opacity) << '"';
    body_ << " points=\"";
    for (const auto& [x, y] : points) body_ << num(x) << ',' << num(y) << ' ';
    body_ << "\"/>\n";
}

void Document::polygon(const std::vector<std::pair<double, double>>& points,
                       const std::string& fill, double opacity) {
    body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
          << "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : points) body_ << num(x) << ',' << num(y) << ' ';
    body_ << "\"/>\n";
}

void Document::text(double x, double y, const std::string& s, double size,
                    const std::string& anchor, double rotate_deg) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << '"';
    if (rotate_deg != 0.0) {
        body_ << " transform=\"rotate(" << num(rotate_deg) << ' ' << num(x) << ' ' << num(y)
              << ")\"";
    }
    body_ << '>' << s << "</text>\n";
}

void Document::circle(double cx, double cy, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
          << "\" fill=\"" << fill << "\"/>\n";
}

std::string Document::str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
        << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
}

void Document::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write svg file: " + path);
    out << str();
}

std::vector<double> nice_ticks(double lo, double hi, int target_count) {
    std::vector<double> ticks;
    if (!(hi > lo) || target_count < 2) return ticks;
    const double raw = (hi - lo) / target_count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + step * 1e-9; t += step) {
        ticks.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
    }
    return ticks;
}

std::pair<double, double> padded_range(double lo, double hi) {
    if (!(hi > lo)) {
        const double w = std::fabs(lo) > 1.0 ? std::fabs(lo) * 0.1 : 1.0;
        return {lo - w, hi + w};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

Frame::Frame(Document& doc, double x_min, double x_max, double y_min, double y_max)
    : doc_(&doc), x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    left_ = 62.0;
    right_ = doc.width() - 18.0;
    top_ = 34.0;
    bottom_ = doc.height() - 44.0;
}

double Frame::px(double x) const {
    return left_ + (x - x_min_) / (x_max_ - x_min_) * (right_ - left_);
}

double Frame::py(double y) const {
    return bottom_ - (y - y_min_) / (y_max_ - y_min_) * (bottom_ - top_);
}

void Frame::axes(const std::string& title, const std::string& x_label,
                 const std::string& y_label) {
    doc_->line(left_, bottom_, right_, bottom_, "black");
    doc_->line(left_, bottom_, left_, top_, "black");
    for (double t : nice_ticks(x_min_, x_max_)) {
        const double x = px(t);
        doc_->line(x, bottom_, x, bottom_ + 4, "black");
        doc_->text(x, bottom_ + 16, num(t), 10, "middle");
    }
    for (double t : nice_ticks(y_min_, y_max_)) {
        const double y = py(t);
        doc_->line(left_ - 4, y, left_, y, "black");
        doc_->text(left_ - 7, y + 3, num(t), 10, "end");
    }
    doc_->text(0.5 * (left_ + right_), 18, title, 13, "middle");
    doc_->text(0.5 * (left_ + right_), doc_->height() - 10, x_label, 11, "middle");
    doc_->text(16, 0.5 * (top_ + bottom_), y_label, 11, "middle", -90);
}

} // namespace hazardlab::svg
