#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace placelab {

/// In-memory CSV: a header row plus data rows, all cells as text.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: comma-separated, double-quote quoting with "" escapes,
/// CR/LF tolerant, newlines allowed inside quoted cells. Fully blank lines
/// are skipped. Throws DataError on ragged rows or broken quoting.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Quote a cell only when it needs it (comma, quote, or newline inside).
std::string csv_escape(std::string_view cell);

/// Write one row, LF-terminated.
void write_csv_row(std::ostream& out, std::span<const std::string> cells);

/// Shortest round-trip decimal form, locale-independent. Integral values
/// print without a trailing ".0".
std::string format_number(double value);

} // namespace placelab
