#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctscreen::text {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

} // namespace ctscreen::text
