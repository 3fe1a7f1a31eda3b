#pragma once

// Minimal CSV emission: '#'-prefixed metadata lines, one header row, numeric
// rows at 12 significant digits.

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gralab::io {

/// printf "%.12g"; non-finite values become "nan", "inf", "-inf".
std::string format_number(double value);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void meta(std::string_view key, std::string_view value);
    void meta(std::string_view key, double value);
    void header(std::initializer_list<std::string_view> columns);
    void header(std::span<const std::string> columns);
    void row(std::initializer_list<double> values);
    void row(std::span<const double> values);

private:
    std::ostream& out_;
};

/// Parsed CSV table: metadata lines, column names, numeric rows.
struct CsvTable {
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Column values by name; throws InvalidArgument if absent.
    std::vector<double> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

} // namespace gralab::io
