#pragma once

// Shared plumbing for the test suites: repo-relative paths and throwaway
// directories for fixture files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string repo_path(const std::string &rel) {
  return std::string(REPO_ROOT) + "/" + rel;
}

inline std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Unique per-instance scratch directory, removed on destruction.
class TmpDir {
 public:
  explicit TmpDir(const std::string &tag) {
    root_ = std::filesystem::temp_directory_path() /
            ("predsym_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    std::filesystem::create_directories(root_);
  }
  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
  TmpDir(const TmpDir &) = delete;
  TmpDir &operator=(const TmpDir &) = delete;

  std::string write(const std::string &name, const std::string &content) const {
    auto p = root_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }

  std::string path(const std::string &name = "") const {
    return name.empty() ? root_.string() : (root_ / name).string();
  }

 private:
  std::filesystem::path root_;
  static inline int counter_ = 0;
};

}  // namespace testutil
