#include "growth/csv.hpp"

#include <ostream>

namespace growth::csv {

std::optional<std::vector<std::string>> split_line(std::string_view line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
            } else {
                cell += c;
                ++i;
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
            ++i;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
            ++i;
        } else {
            cell += c;
            ++i;
        }
    }
    if (quoted)
        return std::nullopt;
    cells.push_back(std::move(cell));
    return cells;
}

std::string escape(std::string_view cell) {
    const bool needs_quotes = cell.find_first_of(",\"") != std::string_view::npos ||
                              (!cell.empty() && (cell.front() == ' ' || cell.back() == ' '));
    if (!needs_quotes)
        return std::string(cell);
    std::string out = "\"";
    for (const char c : cell) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out << ',';
        out << escape(cells[i]);
    }
    out << '\n';
}

} // namespace growth::csv
