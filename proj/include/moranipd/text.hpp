#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace moranipd {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

// Strict full-string parse; throws ValidationError on anything else.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::string_view trim(std::string_view s);

// Split on whitespace runs, no empty tokens.
std::vector<std::string_view> split_ws(std::string_view s);

// Split on a single character, keeping empty fields.
std::vector<std::string_view> split_char(std::string_view s, char sep);

// FNV-1a, 64-bit. Used for config and roster fingerprints in output headers.
std::uint64_t fnv1a64(std::string_view s);

std::string to_hex(std::uint64_t v);

}  // namespace moranipd
