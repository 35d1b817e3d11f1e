#pragma once

#include <string>

namespace pbftpool::cli {

// Writes via a temp file + rename so re-runs replace artifacts atomically.
void write_file_atomic(const std::string& path, const std::string& content);

std::string join_path(const std::string& dir, const std::string& name);

}  // namespace pbftpool::cli
