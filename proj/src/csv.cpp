#include "runway/csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace runway {

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (result.ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return {buffer, result.ptr};
}

std::string format_fixed(double value, int decimals)
{
    if (!std::isfinite(value))
        return format_number(value);
    char buffer[64];
    auto result =
        std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, decimals);
    if (result.ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return {buffer, result.ptr};
}

namespace {

void write_cell(std::ostream& out, const std::string& cell)
{
    if (cell.find_first_of(",\"\n\r") == std::string::npos) {
        out << cell;
        return;
    }
    out << '"';
    for (char ch : cell) {
        if (ch == '"')
            out << '"';
        out << ch;
    }
    out << '"';
}

}  // namespace

void CsvTable::write(std::ostream& out) const
{
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i != 0)
                out << ',';
            write_cell(out, cells[i]);
        }
        out << '\n';
    };
    line(header);
    for (const auto& row : rows)
        line(row);
}

}  // namespace runway
