#ifndef HAZARDLAB_SVG_HPP
#define HAZARDLAB_SVG_HPP

#include <sstream>
#include <string>
#include <vector>

namespace hazardlab::svg {

std::string num(double v); // compact coordinate formatting

class Document {
public:
    Document(double width, double height);
    double width() const { return width_; }
    double height() const { return height_; }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0, const std::string& dash = "");
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", double opacity = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const std::string& stroke, double stroke_width = 1.0, double opacity = 1.0);
    void polygon(const std::vector<std::pair<double, double>>& points, const std::string& fill,
                 double opacity = 1.0);
    void text(double x, double y, const std::string& s, double size = 11.0,
              const std::string& anchor = "start", double rotate_deg = 0.0);
    void circle(double cx, double cy, double r, const std::string& fill);

    std::string str() const;
    void write_file(const std::string& path) const;

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

/// Maps a data rectangle onto a pixel rectangle and draws axes with
/// 1-2-5 "nice" tick marks.
class Frame {
public:
    Frame(Document& doc, double x_min, double x_max, double y_min, double y_max);

    double px(double x) const;
    double py(double y) const;
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double y_min() const { return y_min_; }
    double y_max() const { return y_max_; }

    void axes(const std::string& title, const std::string& x_label, const std::string& y_label);

    Document& doc() { return *doc_; }

private:
    Document* doc_;
    double x_min_, x_max_, y_min_, y_max_;
    double left_, right_, top_, bottom_; // pixel bounds of the plotting area
};

std::vector<double> nice_ticks(double lo, double hi, int target_count = 6);

/// Pad a [lo, hi] data range by 5% on both ends (degenerate ranges widened).
std::pair<double, double> padded_range(double lo, double hi);

} // namespace hazardlab::svg

#endif
