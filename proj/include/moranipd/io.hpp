#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace moranipd {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Minimal CSV: fields are quoted only when they contain a comma, quote, or
// newline; quotes are doubled inside quoted fields.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_parse_line(std::string_view line);

}  // namespace moranipd
