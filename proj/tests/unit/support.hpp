// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <doctest.h>

#include <filesystem>
#include <string>

#include <unistd.h>

#include "groundseq/codec.hpp"
#include "groundseq/manifest.hpp"

namespace test {

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(GROUNDSEQ_TEST_DATA) / name;
}

inline groundseq::json load_json(const std::string& name) {
  return groundseq::json::parse(groundseq::store::read_file(data(name)));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("groundseq-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace test
