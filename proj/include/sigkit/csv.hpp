#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigkit::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers;
};

// Plain comma separated text, no quoting. Blank lines and lines starting with '#' are skipped.
Table read(std::istream& in, const std::string& source);
Table read_file(const std::string& path);

double to_double(const std::string& cell, const std::string& source, int line, int column);
long to_long(const std::string& cell, const std::string& source, int line, int column);

// Shortest text that reads back to the same double.
std::string format(double v);

} // namespace sigkit::csv
