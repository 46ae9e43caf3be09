#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Scratch directory removed when the test ends.
struct TempDir {
  std::filesystem::path root;

  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "mtforge-test-XXXXXX")
            .string();
    root = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(root, ec);
  }

  std::string file(const std::string &name) const {
    return (root / name).string();
  }

  std::string write(const std::string &name, const std::string &content) const {
    std::string path = file(name);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
  }
};

inline std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}
