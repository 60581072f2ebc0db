#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tablemine::io {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Filesystem-safe slug: keeps [A-Za-z0-9._-], maps everything else to '_'.
std::string slugify(std::string_view s);

}  // namespace tablemine::io
