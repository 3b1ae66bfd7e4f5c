#pragma once

#include <string>
#include <string_view>

namespace tsir {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_shortest(double v);
/// Fixed 17-significant-digit text used for CSV output.
std::string format_csv(double v);
/// Parses a full decimal number; returns false on trailing garbage or empty input.
bool parse_number(std::string_view text, double& out);

}  // namespace tsir
