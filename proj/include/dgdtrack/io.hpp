#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dgdtrack {

// Shortest-round-trip-safe decimal form: 17 significant digits ("%.17g").
std::string format_real(double value);

// Shortest "%.Ng" form that parses back to the same double (labels, file names).
std::string format_short(double value);

// Writes `content` to a sibling temporary file and renames it over `path`,
// so readers never observe a partially written file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace dgdtrack
