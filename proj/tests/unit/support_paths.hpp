#pragma once

#include <filesystem>

namespace tests {

inline std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "causalkit_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tests
