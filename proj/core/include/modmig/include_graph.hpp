#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modmig/manifest.hpp"
#include "modmig/scan.hpp"

namespace modmig {

enum class NodeKind { Header, TranslationUnit };

// Per-file facts captured while scanning; carried in the graph so later
// stages never re-read the tree.
struct FileInfo {
  NodeKind kind = NodeKind::Header;
  int lines = 0;
  bool has_guard = false;
  MacroStats macro_stats;

  friend bool operator==(const FileInfo &, const FileInfo &) = default;
};

struct Edge {
  std::string from;
  std::string to;
  IncludeDirective directive;

  friend bool operator==(const Edge &, const Edge &) = default;
};

struct UnresolvedInclude {
  std::string from;
  IncludeDirective directive;

  friend bool operator==(const UnresolvedInclude &,
                         const UnresolvedInclude &) = default;
};

// Directed include graph over canonical file paths. Node, edge and
// diagnostic orders are fully deterministic: scanning the same tree twice
// yields identical structures regardless of concurrency.
struct IncludeGraph {
  std::map<std::string, FileInfo> nodes;
  std::vector<Edge> edges;                  // sorted by (from, to, line)
  std::vector<UnresolvedInclude> unresolved; // sorted by (from, line)
  std::vector<std::string> diagnostics;      // sorted

  friend bool operator==(const IncludeGraph &, const IncludeGraph &) = default;
};

struct BuildOptions {
  int jobs = 1;                             // scan parallelism bound
  bool ignore_conditional_includes = false; // drop flagged directives
};

// Resolution: quote form tries the including file's directory first, then
// the manifest search paths in order; angle form tries search paths only.
// First hit wins. Returns the canonical path, or nullopt when nothing
// matched (recorded by build_graph as an unresolved include).
std::optional<std::string> resolve_include(const std::string &from,
                                           const IncludeDirective &directive,
                                           const LibraryManifest &manifest);

// Scans from all tu_roots and every library interface header (interface
// headers enter the graph even when unreferenced; broken-header detection
// needs them). Throws Error when a tu_root or interface_dir is unreadable.
IncludeGraph build_graph(const LibraryManifest &manifest,
                         const BuildOptions &options = {});

// All nodes reachable from `start` via include edges, excluding `start`
// itself. Throws Error when `start` is not a node.
std::set<std::string> transitive_includes(const IncludeGraph &graph,
                                          const std::string &start);

// Strongly connected components with at least two members, plus self-loop
// singletons. Members sorted; components sorted by smallest member. A DAG
// yields an empty list.
std::vector<std::vector<std::string>> find_cycles(const IncludeGraph &graph);

// Deduplicated out-neighbour adjacency, keyed and ordered canonically.
std::map<std::string, std::vector<std::string>>
out_neighbours(const IncludeGraph &graph);

// Stable golden-file JSON format (sorted node and edge arrays).
std::string graph_to_json(const IncludeGraph &graph);
IncludeGraph graph_from_json(const std::string &text);

} // namespace modmig
