#pragma once

// Small text helpers shared by the readers in the core library.

#include <string>
#include <string_view>
#include <vector>

namespace gammaprime::text {

std::string_view trim(std::string_view s) noexcept;

/// Splits one CSV line on commas and trims every field. No quoting.
std::vector<std::string_view> split_fields(std::string_view line);

/// Parses a whole field as a finite double; false on trailing garbage.
bool parse_double(std::string_view field, double& out) noexcept;

/// Splits text into lines, dropping '\r'.
std::vector<std::string_view> lines(std::string_view text);

/// printf("%.10g") with NaN written as NA.
std::string format_number(double value);

}  // namespace gammaprime::text
