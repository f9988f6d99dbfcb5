#include "placelab/csv.hpp"

#include "placelab/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace placelab {

namespace {

// State machine over the whole buffer; quoted cells may span lines.
CsvTable parse_buffer(const std::string& text) {
    CsvTable table;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool cell_was_quoted = false;
    bool row_has_content = false;
    std::size_t line = 1;

    auto end_cell = [&] {
        row.push_back(std::move(cell));
        cell.clear();
        cell_was_quoted = false;
    };
    auto end_row = [&] {
        end_cell();
        if (row.size() == 1 && row[0].empty() && !row_has_content) {
            row.clear(); // blank line
            return;
        }
        if (table.header.empty()) {
            table.header = std::move(row);
        } else {
            if (row.size() != table.header.size()) {
                throw DataError("csv row at line " + std::to_string(line) + " has " +
                                std::to_string(row.size()) + " cells, expected " +
                                std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(row));
        }
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!cell.empty() || cell_was_quoted) {
                throw DataError("csv: unexpected quote inside cell at line " + std::to_string(line));
            }
            in_quotes = true;
            cell_was_quoted = true;
            row_has_content = true;
            break;
        case ',':
            end_cell();
            row_has_content = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break; // handled by the \n
            end_row();
            ++line;
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default:
            if (cell_was_quoted) {
                throw DataError("csv: stray character after closing quote at line " +
                                std::to_string(line));
            }
            cell.push_back(c);
            row_has_content = true;
            break;
        }
    }
    if (in_quotes) {
        throw DataError("csv: unterminated quoted cell at end of input");
    }
    if (!cell.empty() || !row.empty() || row_has_content) {
        end_row();
    }
    return table;
}

} // namespace

CsvTable read_csv(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw DataError("csv: read failure");
    }
    return parse_buffer(buf.str());
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return read_csv(in);
}

std::string csv_escape(std::string_view cell) {
    bool needs_quotes = cell.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) {
        return std::string(cell);
    }
    std::string out;
    out.reserve(cell.size() + 2);
    out.push_back('"');
    for (char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(cells[i]);
    }
    out.put('\n');
}

std::string format_number(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

} // namespace placelab
