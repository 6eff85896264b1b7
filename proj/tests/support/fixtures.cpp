#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fs = std::filesystem;

namespace testsupport {

namespace {
std::atomic<int> counter{0};
}

TempTree::TempTree() {
  root_ = fs::temp_directory_path() /
          ("modmig_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter.fetch_add(1)));
  fs::create_directories(root_);
}

TempTree::~TempTree() {
  std::error_code ec;
  fs::remove_all(root_, ec);
}

std::string TempTree::write(const std::string &relative,
                            const std::string &content) {
  const fs::path p = root_ / relative;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out)
    throw std::runtime_error("fixture write failed: " + p.generic_string());
  return p.lexically_normal().generic_string();
}

std::string TempTree::path(const std::string &relative) const {
  return (root_ / relative).lexically_normal().generic_string();
}

void TempTree::make_dir(const std::string &relative) {
  fs::create_directories(root_ / relative);
}

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("fixture read failed: " + p.generic_string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace testsupport
