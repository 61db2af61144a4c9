#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace bldc {

/// Locale-independent `%.<digits>g`-style rendering used for CSV traces.
std::string format_sig(double value, int digits = 12);

/// Shortest string that parses back to exactly `value`.
std::string format_exact(double value);

/// Parses the whole of `text` as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text) noexcept;

std::optional<long long> parse_integer(std::string_view text) noexcept;

std::string_view trim(std::string_view text) noexcept;

}  // namespace bldc
