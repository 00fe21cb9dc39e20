#ifndef HAZARDLAB_CSV_HPP
#define HAZARDLAB_CSV_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hazardlab::csv {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// One cell, already rendered. Fields never contain commas in our schemas,
/// so no quoting layer is needed.
struct Cell {
    std::string text;
    Cell(const char* s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
    Cell(double v) : text(format_double(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(long v) : text(std::to_string(v)) {}
    Cell(std::size_t v) : text(std::to_string(v)) {}
    static Cell empty() { return Cell(std::string()); }
};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<Cell>& cells);

private:
    std::ostream& out_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
    double number(std::size_t row, int col) const;
};

Table read(std::istream& in);
Table read_file(const std::string& path);

} // namespace hazardlab::csv

#endif
