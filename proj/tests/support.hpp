#pragma once

#include "supwatt/core.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

namespace support {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("supwatt_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename F>
supwatt::ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const supwatt::Error& e) {
    return e.kind();
  }
  FAIL("expected supwatt::Error");
  return supwatt::ErrorKind::Io;
}

inline std::filesystem::path data_dir() { return SUPWATT_DATA_DIR; }

} // namespace support
