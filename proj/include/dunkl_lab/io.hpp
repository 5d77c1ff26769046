#pragma once

#include <string>

namespace dunkl {

// Writes the whole file to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
std::string format_double(double v);

}  // namespace dunkl
