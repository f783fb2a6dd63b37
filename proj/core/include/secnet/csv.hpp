#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace secnet {

/// Shortest round-trip decimal form ("nan", "inf", "-inf" for non-finite).
std::string format_number(double value);

/// Comma-separated row terminated by LF. Fields containing a comma, quote or
/// newline are quoted.
std::string csv_row(std::initializer_list<std::string_view> fields);
std::string csv_row(const std::vector<std::string>& fields);

/// Writes text to path in binary mode (no newline translation). Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace secnet
