#pragma once

#include <optional>
#include <string>
#include <vector>

namespace modmig {

struct OverlayEntry {
  std::string name;              // file name, no path separators
  std::string external_contents; // absolute physical path

  friend bool operator==(const OverlayEntry &, const OverlayEntry &) = default;
};

struct OverlayRoot {
  std::string name; // absolute directory path with trailing '/'
  std::vector<OverlayEntry> contents;

  friend bool operator==(const OverlayRoot &, const OverlayRoot &) = default;
};

// Virtual filesystem overlay: one nesting level of directory roots holding
// file entries, version fixed at 0.
struct OverlayDocument {
  int version = 0;
  std::vector<OverlayRoot> roots;

  friend bool operator==(const OverlayDocument &,
                         const OverlayDocument &) = default;
};

struct MountSpec {
  std::string virtual_dir;   // absolute
  std::string virtual_name;  // file name within virtual_dir
  std::string physical_path; // absolute
};

// Groups mounts into one root per distinct virtual directory (order of first
// appearance, entries in mount order). Throws Error on an empty mount list,
// non-absolute paths, or duplicate virtual targets.
OverlayDocument build_overlay(const std::vector<MountSpec> &mounts);

// Canonical strict JSON, 2-space indent, fixed key order, trailing newline.
std::string render_overlay(const OverlayDocument &doc);

// Accepts canonical output and the single-quoted variant. Throws Error on
// malformed JSON (with position), version != 0, or unknown type values.
OverlayDocument parse_overlay(const std::string &text);

// In-memory lookup: the physical path mounted at query_path, or nullopt to
// signal pass-through to the real filesystem. Never fails.
std::optional<std::string> resolve(const OverlayDocument &doc,
                                   const std::string &query_path);

struct RelocateResult {
  OverlayDocument doc;
  int changes = 0; // strings rewritten; 0 is a valid no-op
};

// Rewrites every root name and external-contents path under old_prefix to
// live under new_prefix. Matching is segment-aligned: "/build" does not
// match "/builddir".
RelocateResult relocate(const OverlayDocument &doc,
                        const std::string &old_prefix,
                        const std::string &new_prefix);

} // namespace modmig
