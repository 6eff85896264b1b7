#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace modmig {

// Header classification knobs supplied alongside the manifest.
struct ClassificationOverrides {
  std::set<std::string> force_textual; // canonical paths -> Macro (textual)
  std::set<std::string> force_exclude; // canonical paths -> TokenGenerating
  double macro_ratio_threshold = 0.5;  // inclusive, in (0, 1]
};

struct LibrarySpec {
  std::string name;                       // e.g. "DataFormats/TrackerCommon"
  std::string interface_dir;              // canonical directory path
  std::vector<std::string> extra_headers; // canonical paths outside the dir
};

// The scanned codebase: libraries with their public header folders, ordered
// include search paths, and the translation units that anchor reachability.
struct LibraryManifest {
  std::vector<LibrarySpec> libraries;
  std::vector<std::string> search_paths; // order-sensitive
  std::vector<std::string> tu_roots;
  ClassificationOverrides overrides;
  std::string root_dir; // manifest directory; base for relative paths
};

// Lexical path canonicalization: absolute against `base`, `.`/`..` folded,
// forward slashes, no symlink resolution, case preserved.
std::string canonical_path(const std::filesystem::path &p,
                           const std::filesystem::path &base);

// Module-name sanitization shared by manifest validation and the modulemap
// generator: strips every character outside [A-Za-z0-9_].
std::string sanitize_module_name(const std::string &name);
bool is_valid_module_name(const std::string &name);

// Parses and validates manifest JSON. Relative paths resolve against
// `base_dir`. Throws Error on invariant violations (duplicate or unsanitizable
// library names, missing interface_dir, overlapping overrides).
LibraryManifest manifest_from_json(const std::string &text,
                                   const std::filesystem::path &base_dir);

// Reads the manifest file; relative paths resolve against its directory.
LibraryManifest load_manifest(const std::filesystem::path &file);

// All interface headers of one library: every regular file under its
// interface_dir plus extra_headers, canonical, sorted, deduplicated.
std::vector<std::string> library_headers(const LibrarySpec &lib);

// Union of library_headers over all libraries.
std::vector<std::string> all_interface_headers(const LibraryManifest &m);

} // namespace modmig
