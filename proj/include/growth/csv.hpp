#pragma once
/// Minimal line-oriented CSV reading/writing (RFC 4180 quoting, no
/// embedded newlines).

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace growth::csv {

/// Split one line into cells. Double-quoted cells may contain commas and
/// doubled quotes. Returns nullopt on unbalanced quoting.
std::optional<std::vector<std::string>> split_line(std::string_view line);

/// Quote a cell if it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view cell);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

} // namespace growth::csv
