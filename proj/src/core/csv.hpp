#pragma once

#include <cstdio>
#include <string>

namespace cdrl {

// 17 significant digits: round-trips every double exactly.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Write-temp-then-rename so partially written files are never observed.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace cdrl
