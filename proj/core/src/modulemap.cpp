#include "modmig/modulemap.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <json.hpp>

#include "modmig/error.hpp"

namespace fs = std::filesystem;

namespace modmig {

namespace {

std::string project_relative(const std::string &path,
                             const std::string &root_dir) {
  const fs::path rel = fs::path(path).lexically_relative(root_dir);
  if (rel.empty() || *rel.begin() == "..")
    return path; // outside the project tree: keep the canonical path
  return rel.generic_string();
}

std::string join(const std::vector<std::string> &items,
                 const std::string &sep) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i)
      out += sep;
    out += items[i];
  }
  return out;
}

} // namespace

ModulemapResult generate_modulemap(const LibraryManifest &manifest,
                                   const std::vector<HeaderRecord> &records,
                                   const GenerateOptions &options) {
  std::map<std::string, const HeaderRecord *> by_path;
  for (const HeaderRecord &r : records)
    by_path[r.path] = &r;

  // A cycle confined to one library lands in one module by construction;
  // one that spans libraries cannot, so generation refuses it.
  std::map<int, std::set<std::string>> scc_libraries;
  std::map<int, std::vector<std::string>> scc_members;
  for (const LibrarySpec &lib : manifest.libraries) {
    for (const std::string &h : library_headers(lib)) {
      auto it = by_path.find(h);
      if (it == by_path.end())
        throw Error("interface header was never classified: " + h);
      if (it->second->scc_id >= 0) {
        scc_libraries[it->second->scc_id].insert(lib.name);
        scc_members[it->second->scc_id].push_back(h);
      }
    }
  }
  for (const auto &[id, libs] : scc_libraries) {
    if (libs.size() > 1) {
      std::vector<std::string> lib_names(libs.begin(), libs.end());
      throw LayeringViolation(
          "layering violation: include cycle spans libraries " +
          join(lib_names, ", ") + " (headers: " +
          join(scc_members.at(id), ", ") + ")");
    }
  }

  ModulemapResult result;
  std::map<std::string, std::string> module_name_sources;
  for (const LibrarySpec &lib : manifest.libraries) {
    ModuleDef mod;
    mod.name = sanitize_module_name(lib.name) + options.suffix;
    auto ins = module_name_sources.emplace(mod.name, lib.name);
    if (!ins.second)
      throw Error("module name collision after sanitization: libraries '" +
                  ins.first->second + "' and '" + lib.name +
                  "' both map to " + mod.name);

    std::map<std::string, std::string> submodule_sources;
    for (const std::string &h : library_headers(lib)) {
      const HeaderRecord &rec = *by_path.at(h);
      const std::string rel = project_relative(h, manifest.root_dir);
      switch (rec.classification) {
      case Classification::Standalone:
      case Classification::Incomplete:
      case Classification::Cyclic: {
        HeaderEntry entry;
        entry.submodule_name = fs::path(h).stem().generic_string();
        entry.header_path = rel;
        entry.kind = HeaderEntryKind::Normal;
        entry.export_all = true;
        auto sub = submodule_sources.emplace(entry.submodule_name, rel);
        if (!sub.second)
          throw Error("duplicate submodule name \"" + entry.submodule_name +
                      "\" in module " + mod.name + ": " + sub.first->second +
                      " and " + rel);
        mod.entries.push_back(std::move(entry));
        break;
      }
      case Classification::Macro:
        mod.entries.push_back(
            {"", rel, HeaderEntryKind::Textual, false});
        break;
      case Classification::Broken:
        result.omitted.push_back(
            {h, "broken: never included in any translation unit"});
        break;
      case Classification::TokenGenerating:
        result.omitted.push_back(
            {h, "token-generating: excluded from the modulemap"});
        break;
      }
    }
    std::sort(mod.entries.begin(), mod.entries.end(),
              [](const HeaderEntry &a, const HeaderEntry &b) {
                return a.header_path < b.header_path;
              });
    result.doc.modules.push_back(std::move(mod));
  }
  std::sort(result.omitted.begin(), result.omitted.end(),
            [](const OmittedHeader &a, const OmittedHeader &b) {
              return a.path < b.path;
            });
  return result;
}

std::string render_modulemap(const ModulemapDocument &doc) {
  std::string out;
  for (const ModuleDef &mod : doc.modules) {
    out += "module " + mod.name + " {\n";
    for (const HeaderEntry &e : mod.entries) {
      if (e.kind == HeaderEntryKind::Normal)
        out += "  module \"" + e.submodule_name + "\" {header \"" +
               e.header_path + "\" export *}\n";
      else
        out += "  textual header \"" + e.header_path + "\"\n";
    }
    out += "}\n";
  }
  return out;
}

namespace {

struct Token {
  enum class Kind { Identifier, String, LBrace, RBrace, Star, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string &text) : text_(text) {}

  Token next() {
    skip_whitespace();
    Token t;
    t.line = line_;
    if (pos_ >= text_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      t.kind = Token::Kind::LBrace;
      t.text = "{";
      return t;
    }
    if (c == '}') {
      ++pos_;
      t.kind = Token::Kind::RBrace;
      t.text = "}";
      return t;
    }
    if (c == '*') {
      ++pos_;
      t.kind = Token::Kind::Star;
      t.text = "*";
      return t;
    }
    if (c == '"') {
      ++pos_;
      const size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n')
        ++pos_;
      if (pos_ >= text_.size() || text_[pos_] != '"')
        throw Error("line " + std::to_string(t.line) +
                    ": unterminated string literal");
      t.kind = Token::Kind::String;
      t.text = text_.substr(start, pos_ - start);
      ++pos_;
      return t;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      const size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_' || text_[pos_] == '.'))
        ++pos_;
      t.kind = Token::Kind::Identifier;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    throw Error("line " + std::to_string(line_) +
                ": unexpected character '" + std::string(1, c) + "'");
  }

private:
  void skip_whitespace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n')
        ++line_;
      ++pos_;
    }
  }

  const std::string &text_;
  size_t pos_ = 0;
  int line_ = 1;
};

class Parser {
public:
  explicit Parser(const std::string &text) : lexer_(text) { advance(); }

  ModulemapDocument parse_document() {
    ModulemapDocument doc;
    std::set<std::string> names;
    while (current_.kind != Token::Kind::End) {
      expect_keyword("module");
      ModuleDef mod;
      mod.name = expect(Token::Kind::Identifier, "module name");
      if (!names.insert(mod.name).second)
        throw Error("line " + std::to_string(current_.line) +
                    ": duplicate module name " + mod.name);
      const int open_line = current_.line;
      expect(Token::Kind::LBrace, "'{'");
      while (current_.kind != Token::Kind::RBrace) {
        if (current_.kind == Token::Kind::End)
          throw Error("unexpected end of input: unclosed '{' opened at line " +
                      std::to_string(open_line));
        mod.entries.push_back(parse_entry());
      }
      advance(); // '}'
      doc.modules.push_back(std::move(mod));
    }
    return doc;
  }

private:
  HeaderEntry parse_entry() {
    if (current_.kind != Token::Kind::Identifier)
      throw Error("line " + std::to_string(current_.line) +
                  ": expected 'module' or 'textual', got '" + current_.text +
                  "'");
    if (current_.text == "textual") {
      advance();
      expect_keyword("header");
      HeaderEntry e;
      e.header_path = expect(Token::Kind::String, "header path string");
      e.kind = HeaderEntryKind::Textual;
      e.export_all = false;
      return e;
    }
    if (current_.text == "module") {
      advance();
      HeaderEntry e;
      e.submodule_name = expect(Token::Kind::String, "submodule name string");
      const int open_line = current_.line;
      expect(Token::Kind::LBrace, "'{'");
      expect_keyword("header");
      e.header_path = expect(Token::Kind::String, "header path string");
      expect_keyword("export");
      expect(Token::Kind::Star, "'*'");
      if (current_.kind != Token::Kind::RBrace)
        throw Error("unexpected content in submodule opened at line " +
                    std::to_string(open_line));
      advance();
      e.kind = HeaderEntryKind::Normal;
      e.export_all = true;
      return e;
    }
    throw Error("line " + std::to_string(current_.line) +
                ": unknown construct '" + current_.text + "'");
  }

  void advance() { current_ = lexer_.next(); }

  std::string expect(Token::Kind kind, const std::string &what) {
    if (current_.kind != kind)
      throw Error("line " + std::to_string(current_.line) + ": expected " +
                  what + ", got '" + current_.text + "'");
    std::string text = current_.text;
    advance();
    return text;
  }

  void expect_keyword(const std::string &kw) {
    if (current_.kind != Token::Kind::Identifier || current_.text != kw)
      throw Error("line " + std::to_string(current_.line) + ": expected '" +
                  kw + "', got '" + current_.text + "'");
    advance();
  }

  Lexer lexer_;
  Token current_;
};

} // namespace

ModulemapDocument parse_modulemap(const std::string &text) {
  return Parser(text).parse_document();
}

std::string omitted_to_json(const std::vector<OmittedHeader> &omitted) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const OmittedHeader &o : omitted) {
    nlohmann::ordered_json oj;
    oj["path"] = o.path;
    oj["reason"] = o.reason;
    j.push_back(std::move(oj));
  }
  return j.dump(2) + "\n";
}

} // namespace modmig
