#include "sigkit/csv.hpp"

#include "sigkit/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sigkit::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string where(const std::string& source, int line, int column) {
    return source + ":" + std::to_string(line) + ":" + std::to_string(column);
}

} // namespace

Table read(std::istream& in, const std::string& source) {
    Table t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        auto cells = split(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw InputError(where(source, lineno, static_cast<int>(cells.size()) + 1) + ": expected " +
                             std::to_string(t.header.size()) + " columns, got " +
                             std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header) throw InputError(source + ": missing header");
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read(in, path);
}

double to_double(const std::string& cell, const std::string& source, int line, int column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
        throw InputError(where(source, line, column) + ": not a number: '" + cell + "'");
    if (!std::isfinite(v)) throw InputError(where(source, line, column) + ": nonfinite value");
    return v;
}

long to_long(const std::string& cell, const std::string& source, int line, int column) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
        throw InputError(where(source, line, column) + ": not an integer: '" + cell + "'");
    return v;
}

std::string format(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace sigkit::csv
