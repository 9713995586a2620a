#pragma once

#include <string>

namespace dq {

// Throws ParseError when the file cannot be read/written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace dq
