#include "modmig/overlay.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "modmig/error.hpp"

namespace modmig {

namespace {

bool is_absolute(const std::string &p) { return !p.empty() && p[0] == '/'; }

std::string with_trailing_slash(std::string dir) {
  if (dir.empty() || dir.back() != '/')
    dir += '/';
  return dir;
}

std::string strip_trailing_slash(std::string p) {
  while (p.size() > 1 && p.back() == '/')
    p.pop_back();
  if (p == "/")
    return ""; // so prefix + "/" matches every absolute path
  return p;
}

// Rewrites JSON single-quoted strings to standard double-quoted form; the
// published overlay examples use the former.
std::string normalize_single_quotes(const std::string &text) {
  std::string out;
  out.reserve(text.size());
  enum class State { Outside, Single, Double };
  State state = State::Outside;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    switch (state) {
    case State::Outside:
      if (c == '\'') {
        state = State::Single;
        out += '"';
      } else {
        if (c == '"')
          state = State::Double;
        out += c;
      }
      break;
    case State::Single:
      if (c == '\'') {
        state = State::Outside;
        out += '"';
      } else if (c == '"') {
        out += "\\\"";
      } else {
        out += c;
      }
      break;
    case State::Double:
      if (c == '\\' && i + 1 < text.size()) {
        out += c;
        out += text[++i];
      } else {
        if (c == '"')
          state = State::Outside;
        out += c;
      }
      break;
    }
  }
  return out;
}

} // namespace

OverlayDocument build_overlay(const std::vector<MountSpec> &mounts) {
  if (mounts.empty())
    throw Error("overlay requires at least one mount");
  OverlayDocument doc;
  std::map<std::string, size_t> root_index;
  std::map<std::pair<std::string, std::string>, std::string> seen;
  for (const MountSpec &m : mounts) {
    if (!is_absolute(m.virtual_dir))
      throw Error("virtual directory is not absolute: " + m.virtual_dir);
    if (!is_absolute(m.physical_path))
      throw Error("physical path is not absolute: " + m.physical_path);
    if (m.virtual_name.empty() ||
        m.virtual_name.find('/') != std::string::npos)
      throw Error("virtual file name must be a bare file name: " +
                  m.virtual_name);
    const std::string dir = with_trailing_slash(m.virtual_dir);
    auto dup = seen.emplace(std::make_pair(dir, m.virtual_name),
                            m.physical_path);
    if (!dup.second)
      throw Error("duplicate virtual target " + dir + m.virtual_name +
                  ": mapped to both " + dup.first->second + " and " +
                  m.physical_path);
    auto [it, inserted] = root_index.emplace(dir, doc.roots.size());
    if (inserted)
      doc.roots.push_back({dir, {}});
    doc.roots[it->second].contents.push_back({m.virtual_name, m.physical_path});
  }
  return doc;
}

std::string render_overlay(const OverlayDocument &doc) {
  nlohmann::ordered_json j;
  j["version"] = doc.version;
  j["roots"] = nlohmann::ordered_json::array();
  for (const OverlayRoot &root : doc.roots) {
    nlohmann::ordered_json rj;
    rj["name"] = root.name;
    rj["type"] = "directory";
    rj["contents"] = nlohmann::ordered_json::array();
    for (const OverlayEntry &e : root.contents) {
      nlohmann::ordered_json ej;
      ej["name"] = e.name;
      ej["type"] = "file";
      ej["external-contents"] = e.external_contents;
      rj["contents"].push_back(std::move(ej));
    }
    j["roots"].push_back(std::move(rj));
  }
  return j.dump(2) + "\n";
}

OverlayDocument parse_overlay(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &) {
    try {
      j = nlohmann::json::parse(normalize_single_quotes(text));
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(std::string("malformed overlay JSON: ") + e.what());
    }
  }
  if (!j.is_object() || !j.contains("version"))
    throw Error("overlay JSON lacks a version field");
  if (!j.at("version").is_number_integer() ||
      j.at("version").get<int>() != 0)
    throw Error("unsupported overlay version: " + j.at("version").dump());

  OverlayDocument doc;
  for (const auto &rj : j.value("roots", nlohmann::json::array())) {
    const std::string type = rj.value("type", "");
    if (type != "directory")
      throw Error("unknown overlay root type: '" + type + "'");
    OverlayRoot root;
    root.name = rj.value("name", "");
    if (!is_absolute(root.name))
      throw Error("overlay root name is not absolute: " + root.name);
    root.name = with_trailing_slash(root.name);
    for (const auto &ej : rj.value("contents", nlohmann::json::array())) {
      const std::string etype = ej.value("type", "");
      if (etype == "directory")
        throw Error("nested directory entries are not supported (root " +
                    root.name + ")");
      if (etype != "file")
        throw Error("unknown overlay entry type: '" + etype + "'");
      OverlayEntry entry;
      entry.name = ej.value("name", "");
      if (entry.name.empty() || entry.name.find('/') != std::string::npos)
        throw Error("overlay entry name must be a bare file name: " +
                    entry.name);
      entry.external_contents = ej.value("external-contents", "");
      root.contents.push_back(std::move(entry));
    }
    if (root.contents.empty())
      throw Error("overlay root has no contents: " + root.name);
    doc.roots.push_back(std::move(root));
  }
  return doc;
}

std::optional<std::string> resolve(const OverlayDocument &doc,
                                   const std::string &query_path) {
  for (const OverlayRoot &root : doc.roots) {
    const std::string base = with_trailing_slash(root.name);
    for (const OverlayEntry &e : root.contents)
      if (query_path == base + e.name)
        return e.external_contents;
  }
  return std::nullopt;
}

namespace {

// Segment-aligned prefix rewrite; returns true when `path` changed.
bool rewrite_prefix(std::string &path, const std::string &old_stripped,
                    const std::string &new_stripped) {
  const bool match = path == old_stripped ||
                     path.compare(0, old_stripped.size() + 1,
                                  old_stripped + "/") == 0;
  if (!match)
    return false;
  const std::string replaced =
      new_stripped + path.substr(old_stripped.size());
  if (replaced == path)
    return false;
  path = replaced;
  return true;
}

} // namespace

RelocateResult relocate(const OverlayDocument &doc,
                        const std::string &old_prefix,
                        const std::string &new_prefix) {
  const std::string old_s = strip_trailing_slash(old_prefix);
  const std::string new_s = strip_trailing_slash(new_prefix);
  RelocateResult result{doc, 0};
  for (OverlayRoot &root : result.doc.roots) {
    if (rewrite_prefix(root.name, old_s, new_s))
      ++result.changes;
    for (OverlayEntry &e : root.contents)
      if (rewrite_prefix(e.external_contents, old_s, new_s))
        ++result.changes;
  }
  return result;
}

} // namespace modmig
