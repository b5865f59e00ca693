#pragma once

#include <filesystem>
#include <string>

namespace pops {

/// Writes `contents` to a temporary sibling of `path`, then renames it over
/// `path`, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// printf("%.17g")
std::string format_double(double value);

}  // namespace pops
