#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scinov {

/// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double v);
/// Shortest decimal that reads back as the same float.
std::string format_float(float v);

/// Empty string for an absent value.
std::string format_optional(const std::optional<double>& v);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);

}  // namespace scinov
