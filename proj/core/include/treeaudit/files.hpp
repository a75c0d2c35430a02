#pragma once

#include <string>

namespace treeaudit {

// Both throw IoError naming the path.
std::string read_file(const std::string& path);
// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace treeaudit
