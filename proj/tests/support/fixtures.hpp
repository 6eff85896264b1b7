#pragma once

#include <filesystem>
#include <string>

namespace testsupport {

// Self-deleting directory tree for filesystem fixtures.
class TempTree {
public:
  TempTree();
  ~TempTree();
  TempTree(const TempTree &) = delete;
  TempTree &operator=(const TempTree &) = delete;

  const std::filesystem::path &root() const { return root_; }
  // Writes a file (creating parents) and returns its canonical path.
  std::string write(const std::string &relative, const std::string &content);
  std::string path(const std::string &relative) const;
  void make_dir(const std::string &relative);

private:
  std::filesystem::path root_;
};

std::string read_file(const std::filesystem::path &p);

} // namespace testsupport
