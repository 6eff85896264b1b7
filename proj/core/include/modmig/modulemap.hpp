#pragma once

#include <string>
#include <vector>

#include "modmig/manifest.hpp"
#include "modmig/sanitizer.hpp"

namespace modmig {

enum class HeaderEntryKind { Normal, Textual };

struct HeaderEntry {
  std::string submodule_name; // empty for Textual entries
  std::string header_path;    // project-relative
  HeaderEntryKind kind = HeaderEntryKind::Normal;
  bool export_all = false; // always true for Normal entries

  friend bool operator==(const HeaderEntry &, const HeaderEntry &) = default;
};

struct ModuleDef {
  std::string name; // sanitized library name plus suffix
  std::vector<HeaderEntry> entries;

  friend bool operator==(const ModuleDef &, const ModuleDef &) = default;
};

struct ModulemapDocument {
  std::vector<ModuleDef> modules;

  friend bool operator==(const ModulemapDocument &,
                         const ModulemapDocument &) = default;
};

struct OmittedHeader {
  std::string path;
  std::string reason;

  friend bool operator==(const OmittedHeader &,
                         const OmittedHeader &) = default;
};

struct ModulemapResult {
  ModulemapDocument doc;
  std::vector<OmittedHeader> omitted;
};

struct GenerateOptions {
  std::string suffix = "_xr";
};

// One module per library: Standalone/Incomplete/Cyclic headers become
// normal submodule entries (export *), Macro headers textual entries,
// Broken and TokenGenerating headers are omitted with a reason. Entries are
// sorted by header path. Throws LayeringViolation when an include cycle
// spans two libraries and Error on name collisions.
ModulemapResult generate_modulemap(const LibraryManifest &manifest,
                                   const std::vector<HeaderRecord> &records,
                                   const GenerateOptions &options = {});

// Byte-deterministic rendering: LF endings, two-space indent, no trailing
// whitespace, single trailing newline.
std::string render_modulemap(const ModulemapDocument &doc);

// Inverse of render_modulemap on its image; whitespace-insensitive between
// tokens. Throws Error with a line number on unknown constructs.
ModulemapDocument parse_modulemap(const std::string &text);

std::string omitted_to_json(const std::vector<OmittedHeader> &omitted);

} // namespace modmig
