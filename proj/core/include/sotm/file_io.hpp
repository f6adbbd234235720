#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace sotm {

/// Writes through a sibling temporary file and renames it into place.
/// Throws WriteError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Throws Error if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// printf-style "%.<digits>g".
std::string format_number(double value, int significant_digits = 6);

}  // namespace sotm
