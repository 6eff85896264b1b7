#include "modmig/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "modmig/error.hpp"

namespace fs = std::filesystem;

namespace modmig {

std::string canonical_path(const fs::path &p, const fs::path &base) {
  fs::path abs = p.is_absolute() ? p : base / p;
  std::string s = abs.lexically_normal().generic_string();
  while (s.size() > 1 && s.back() == '/')
    s.pop_back();
  return s;
}

std::string sanitize_module_name(const std::string &name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name)
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      out += c;
  return out;
}

bool is_valid_module_name(const std::string &name) {
  if (name.empty())
    return false;
  if (std::isdigit(static_cast<unsigned char>(name.front())))
    return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

namespace {

std::string read_file_or_throw(const fs::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw Error("cannot read file: " + file.generic_string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

LibraryManifest manifest_from_json(const std::string &text,
                                   const fs::path &base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(std::string("malformed manifest JSON: ") + e.what());
  }
  if (!j.is_object())
    throw Error("manifest must be a JSON object");

  LibraryManifest m;
  m.root_dir = canonical_path(base_dir, fs::current_path());

  std::set<std::string> seen_names;
  for (const auto &lj : j.value("libraries", nlohmann::json::array())) {
    LibrarySpec lib;
    lib.name = lj.value("name", "");
    if (lib.name.empty())
      throw Error("library with empty name in manifest");
    if (!seen_names.insert(lib.name).second)
      throw Error("duplicate library name in manifest: " + lib.name);
    if (!is_valid_module_name(sanitize_module_name(lib.name)))
      throw Error("library name does not sanitize to a valid module name: " +
                  lib.name);
    if (!lj.contains("interface_dir"))
      throw Error("library " + lib.name + " lacks interface_dir");
    lib.interface_dir =
        canonical_path(lj.at("interface_dir").get<std::string>(), m.root_dir);
    if (!fs::is_directory(lib.interface_dir))
      throw Error("interface_dir does not exist: " + lib.interface_dir +
                  " (library " + lib.name + ")");
    for (const auto &h : lj.value("extra_headers", nlohmann::json::array()))
      lib.extra_headers.push_back(
          canonical_path(h.get<std::string>(), m.root_dir));
    m.libraries.push_back(std::move(lib));
  }

  for (const auto &sp : j.value("search_paths", nlohmann::json::array()))
    m.search_paths.push_back(
        canonical_path(sp.get<std::string>(), m.root_dir));
  for (const auto &tu : j.value("tu_roots", nlohmann::json::array()))
    m.tu_roots.push_back(canonical_path(tu.get<std::string>(), m.root_dir));

  if (j.contains("overrides")) {
    const auto &ov = j.at("overrides");
    for (const auto &p : ov.value("force_textual", nlohmann::json::array()))
      m.overrides.force_textual.insert(
          canonical_path(p.get<std::string>(), m.root_dir));
    for (const auto &p : ov.value("force_exclude", nlohmann::json::array()))
      m.overrides.force_exclude.insert(
          canonical_path(p.get<std::string>(), m.root_dir));
    m.overrides.macro_ratio_threshold =
        ov.value("macro_ratio_threshold", 0.5);
    if (!(m.overrides.macro_ratio_threshold > 0.0 &&
          m.overrides.macro_ratio_threshold <= 1.0))
      throw Error("macro_ratio_threshold must lie in (0, 1]");
    std::vector<std::string> both;
    std::set_intersection(m.overrides.force_textual.begin(),
                          m.overrides.force_textual.end(),
                          m.overrides.force_exclude.begin(),
                          m.overrides.force_exclude.end(),
                          std::back_inserter(both));
    if (!both.empty())
      throw Error("header listed in both force_textual and force_exclude: " +
                  both.front());
  }
  return m;
}

LibraryManifest load_manifest(const fs::path &file) {
  const std::string text = read_file_or_throw(file);
  fs::path dir = file.parent_path();
  if (dir.empty())
    dir = fs::current_path();
  return manifest_from_json(text, dir);
}

std::vector<std::string> library_headers(const LibrarySpec &lib) {
  std::vector<std::string> headers;
  std::error_code ec;
  fs::recursive_directory_iterator it(lib.interface_dir, ec), end;
  if (ec)
    throw Error("cannot enumerate interface_dir: " + lib.interface_dir +
                " (" + ec.message() + ")");
  for (; it != end; it.increment(ec)) {
    if (ec)
      throw Error("cannot enumerate interface_dir: " + lib.interface_dir +
                  " (" + ec.message() + ")");
    if (it->is_regular_file())
      headers.push_back(canonical_path(it->path(), lib.interface_dir));
  }
  headers.insert(headers.end(), lib.extra_headers.begin(),
                 lib.extra_headers.end());
  std::sort(headers.begin(), headers.end());
  headers.erase(std::unique(headers.begin(), headers.end()), headers.end());
  return headers;
}

std::vector<std::string> all_interface_headers(const LibraryManifest &m) {
  std::vector<std::string> headers;
  for (const LibrarySpec &lib : m.libraries) {
    const std::vector<std::string> libs = library_headers(lib);
    headers.insert(headers.end(), libs.begin(), libs.end());
  }
  std::sort(headers.begin(), headers.end());
  headers.erase(std::unique(headers.begin(), headers.end()), headers.end());
  return headers;
}

} // namespace modmig
