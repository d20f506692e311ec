#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rwt {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view line, char delimiter = ',');

// 64-bit FNV-1a; used for content checksums and config hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

}  // namespace rwt
