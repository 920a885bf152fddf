#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace runway {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Rows of already-formatted cells under a header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& out) const;
};

}  // namespace runway
