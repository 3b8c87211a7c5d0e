#pragma once

// CSV serialization for trajectory series. Floats are written with
// std::to_chars (shortest round-trip form), so equal doubles give equal
// bytes and parsing restores them exactly.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fhn/config.hpp"
#include "fhn/sim.hpp"

namespace fhn {

inline std::string series_to_csv(const Series& s) {
    std::ostringstream out;
    for (std::size_t i = 0; i < s.columns.size(); ++i) {
        if (i) out << ",";
        out << s.columns[i];
    }
    out << "\n";
    for (const auto& row : s.rows) {
        if (row.size() != s.columns.size())
            throw std::logic_error("series_to_csv: ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_double(row[i]);
        }
        out << "\n";
    }
    return out.str();
}

inline void write_series_csv(const Series& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << series_to_csv(s);
}

inline Series series_from_csv(const std::string& text) {
    Series s;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("series_from_csv: empty input");
    std::istringstream head(line);
    std::string cell;
    while (std::getline(head, cell, ',')) s.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != s.columns.size())
            throw std::invalid_argument("series_from_csv: ragged row");
        s.rows.push_back(std::move(vals));
    }
    return s;
}

inline Series read_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return series_from_csv(ss.str());
}

} // namespace fhn
