#pragma once

// Strict CSV reading/writing used by every external interface.
//
// Numbers are written in the shortest decimal form that round-trips to the
// same double (std::to_chars), which makes repeated runs byte-identical.
// Readers are strict: a header row is mandatory, every data row must have
// the header's column count, and every cell must parse fully as a double.

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace hypmass::csv {

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw input_error("csv: missing required column '" + std::string(name) + "'");
    }
};

inline void write(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) os << ',';
        os << t.header[i];
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line_no) {
    std::size_t b = cell.find_first_not_of(" \t");
    std::size_t e = cell.find_last_not_of(" \t");
    if (b == std::string::npos)
        throw input_error("csv: empty cell on line " + std::to_string(line_no));
    double value = 0.0;
    const char* first = cell.data() + b;
    const char* last = cell.data() + e + 1;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw input_error("csv: cannot parse number '" + cell + "' on line " +
                          std::to_string(line_no));
    return value;
}

} // namespace detail

inline Table read(std::istream& is) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto cells = detail::split_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            if (t.header.empty()) throw input_error("csv: empty header row");
            continue;
        }
        if (cells.size() != t.header.size())
            throw input_error("csv: line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(t.header.size()));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            row[i] = detail::parse_cell(cells[i], line_no);
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw input_error("csv: input is empty");
    return t;
}

inline Table read_string(const std::string& text) {
    std::istringstream is(text);
    return read(is);
}

// Check that a column holds the uniform periodic angles 2*pi*j/n in order.
inline void require_uniform_angles(const Table& t, std::size_t col) {
    const std::size_t n = t.rows.size();
    if (n == 0) throw input_error("csv: no data rows");
    constexpr double two_pi = 6.28318530717958647692528676655900577;
    for (std::size_t j = 0; j < n; ++j) {
        const double expect = two_pi * double(j) / double(n);
        if (std::abs(t.rows[j][col] - expect) > 1e-9 * two_pi)
            throw input_error("csv: angle column is not the uniform grid 2*pi*j/" +
                              std::to_string(n) + " (row " + std::to_string(j) + ")");
    }
}

} // namespace hypmass::csv
