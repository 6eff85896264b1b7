#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "modmig/include_graph.hpp"
#include "modmig/manifest.hpp"
#include "modmig/modulemap.hpp"

namespace modmig {

// Header path -> module name; unmapped headers are simply absent. Pseudo
// modules standing in for external dependency roots are listed in
// external_modules.
struct ModuleAssignment {
  std::map<std::string, std::string> header_to_module;
  std::set<std::string> external_modules;

  friend bool operator==(const ModuleAssignment &,
                         const ModuleAssignment &) = default;
};

// Module-level dependency graph. Edge (a, b) means a module-a header
// directly includes a module-b header; multiplicity counts distinct header
// pairs. No self-edges.
struct ModuleDepGraph {
  std::set<std::string> nodes;
  std::set<std::string> externals; // subset of nodes
  std::map<std::pair<std::string, std::string>, int> edges;

  friend bool operator==(const ModuleDepGraph &,
                         const ModuleDepGraph &) = default;
};

struct DuplicationRow {
  std::string path;
  int duplication_count = 0; // 1 for mapped headers, closure count otherwise
  int lines = 0;
  long long duplicated_lines = 0; // duplication_count * lines

  friend bool operator==(const DuplicationRow &,
                         const DuplicationRow &) = default;
};

struct DuplicationReport {
  std::vector<DuplicationRow> rows; // sorted by duplicated_lines desc, path
  long long total_duplicated_lines = 0;

  friend bool operator==(const DuplicationReport &,
                         const DuplicationReport &) = default;
};

struct MigrationPlan {
  std::vector<std::string> order;
  std::vector<std::vector<std::string>> cycle_groups; // must migrate together
  bool external_first = false; // all externals precede all internal modules

  friend bool operator==(const MigrationPlan &, const MigrationPlan &) = default;
};

struct CostEstimate {
  long long textual_lines = 0; // headers re-counted per translation unit
  long long modular_lines = 0; // mapped once, unmapped per duplication count

  friend bool operator==(const CostEstimate &, const CostEstimate &) = default;
};

// Mapping induced by a modulemap: every normal entry's header (resolved
// against root_dir) maps to its module. Textual entries stay unmapped.
ModuleAssignment assignment_from_modulemap(const ModulemapDocument &doc,
                                           const std::string &root_dir);

// Throws Error when the assignment names a header missing from the graph.
ModuleDepGraph module_dependency_graph(const IncludeGraph &graph,
                                       const ModuleAssignment &assignment);

// duplication_count of an unmapped header = number of distinct modules whose
// mapped headers transitively include it; a mapped header counts once in its
// own module. line_counts must cover every graph header.
DuplicationReport duplication_report(const IncludeGraph &graph,
                                     const ModuleAssignment &assignment,
                                     const std::map<std::string, int> &line_counts);

// Headers outside every library's interface set, transitively included from
// some mapped header, grouped by the first search-path root containing them.
std::map<std::string, std::set<std::string>>
detect_external_candidates(const IncludeGraph &graph,
                           const LibraryManifest &manifest,
                           const ModuleAssignment &assignment);

// Adds one pseudo-module per external root ("external:<root>") covering the
// grouped headers; used for ordering, not for duplication accounting.
ModuleAssignment extend_with_externals(
    ModuleAssignment assignment,
    const std::map<std::string, std::set<std::string>> &external_groups);

// Reverse-topological order of the SCC condensation: dependencies first,
// external pseudo-modules before internal modules of equal rank, then
// lexicographic. Mutually dependent modules become cycle_groups, emitted
// consecutively and never silently linearized.
MigrationPlan bottom_up_order(const ModuleDepGraph &dep);

// Line-count cost model: textual re-parses every header once per including
// translation unit; modular persists mapped headers once and unmapped ones
// per duplication count.
CostEstimate parse_cost_estimate(const IncludeGraph &graph,
                                 const ModuleAssignment &assignment,
                                 const std::map<std::string, int> &line_counts);

std::string plan_to_json(const MigrationPlan &plan,
                         const ModuleDepGraph &dep,
                         const DuplicationReport &report,
                         const CostEstimate &cost);

} // namespace modmig
