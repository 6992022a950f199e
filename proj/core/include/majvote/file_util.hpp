#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace majvote {

/// Reads a whole file as bytes. Throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`, so
/// readers never observe a half-written file. Throws DataError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace majvote
