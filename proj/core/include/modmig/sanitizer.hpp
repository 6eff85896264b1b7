#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modmig/include_graph.hpp"
#include "modmig/manifest.hpp"

namespace modmig {

enum class Classification {
  Standalone,
  Incomplete,
  Broken,
  Cyclic,
  Macro,
  TokenGenerating,
};

std::string to_string(Classification c);
Classification classification_from_string(const std::string &s);

struct HeaderRecord {
  std::string path;
  bool has_guard = false;
  MacroStats macro_stats;
  Classification classification = Classification::Standalone;
  std::vector<std::string> evidence; // non-empty for non-Standalone
  int scc_id = -1;                   // index into find_cycles output, or -1

  friend bool operator==(const HeaderRecord &, const HeaderRecord &) = default;
};

struct CompileCheckResult {
  std::string header;
  bool succeeded = false;
  std::vector<std::string> missing_includes; // empty when succeeded
  std::string raw_diagnostics;

  friend bool operator==(const CompileCheckResult &,
                         const CompileCheckResult &) = default;
};

struct CheckCommand {
  std::string header;
  std::string command;

  friend bool operator==(const CheckCommand &, const CheckCommand &) = default;
};

// What an external command run produced: exit status and diagnostic text.
struct ExecResult {
  int exit_code = 0;
  std::string output;
};

// Invoked once per check command; may run concurrently. A thrown exception
// counts as a spawn failure for that command.
using CommandExecutor = std::function<ExecResult(const CheckCommand &)>;

// Initial records (path, guard, macro stats) for every interface header,
// sorted by path. Classification left Standalone until classify_headers.
std::vector<HeaderRecord> collect_records(const IncludeGraph &graph,
                                          const LibraryManifest &manifest);

// Interface headers never included from any translation unit and not
// themselves tu_roots.
std::set<std::string> detect_broken(const IncludeGraph &graph,
                                    const LibraryManifest &manifest);

// Headers whose macro ratio macro_defs / max(1, macro_defs + decl_lines)
// reaches the threshold (inclusive), plus everything force_textual.
std::set<std::string> detect_macro_headers(
    const std::vector<HeaderRecord> &records,
    const ClassificationOverrides &overrides);

// Applies the classification precedence:
//   force_exclude > force_textual > cyclic > broken > macro > incomplete,
// defaulting to Standalone. A header lacking a compile result it would need
// is classified Standalone with evidence "unchecked" (non-fatal).
std::vector<HeaderRecord> classify_headers(
    const IncludeGraph &graph, const LibraryManifest &manifest,
    std::vector<HeaderRecord> records,
    const std::vector<std::vector<std::string>> &sccs,
    const std::map<std::string, CompileCheckResult> &compile_results,
    const ClassificationOverrides &overrides);

// One command per header in sorted path order. The template must contain
// "{header}"; "{out}" expands to a per-header output path (under out_dir
// when given, next to the header otherwise).
std::vector<CheckCommand> standalone_check_plan(
    std::vector<std::string> headers, const std::string &command_template,
    const std::string &out_dir = "");

std::string default_missing_include_pattern();

// Runs the plan with at most `parallelism` concurrent commands. Result order
// always matches plan order. missing_includes come from diagnostic lines
// matching `missing_include_pattern` (first non-empty capture group).
std::vector<CompileCheckResult> run_standalone_checks(
    const std::vector<CheckCommand> &plan, const CommandExecutor &executor,
    int parallelism,
    const std::string &missing_include_pattern =
        default_missing_include_pattern());

// Executor backed by the system shell; captures interleaved stdout/stderr.
CommandExecutor shell_executor();

struct BreakSuggestion {
  std::string from;
  std::string to;
  std::string rationale;

  friend bool operator==(const BreakSuggestion &,
                         const BreakSuggestion &) = default;
};

// Minimum edge set whose removal acyclifies the SCC's induced subgraph.
// Exact (exhaustive) up to 10 internal edges, greedy beyond; ties broken
// lexicographically by (from, to). Throws Error for components of size < 2.
std::vector<BreakSuggestion>
suggest_cycle_breaks(const IncludeGraph &graph,
                     const std::set<std::string> &scc);

std::string records_to_json(const std::vector<HeaderRecord> &records);
std::vector<HeaderRecord> records_from_json(const std::string &text);

} // namespace modmig
