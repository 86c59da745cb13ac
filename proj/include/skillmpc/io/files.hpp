#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace skillmpc {

// Writes to a temporary file next to `path`, then renames it into place, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Throws FormatError if the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace skillmpc
