#pragma once

#include <string>
#include <string_view>
#include <optional>

namespace abba {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses the whole of `text` as a double; nullopt on any trailing garbage.
/// Non-finite spellings ("nan", "inf") parse successfully and are left to
/// the caller to reject.
std::optional<double> parse_double(std::string_view text);

}  // namespace abba
