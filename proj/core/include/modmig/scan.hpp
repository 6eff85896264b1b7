#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace modmig {

// One #include directive as written in the source text.
struct IncludeDirective {
  std::string spelled_path; // text between the delimiters, verbatim
  bool angle_form = false;  // true for <...>, false for "..."
  int line = 0;             // 1-based
  // True when the directive sits inside any #if/#ifdef/#ifndef region other
  // than the file's own include guard.
  bool conditional = false;

  friend bool operator==(const IncludeDirective &,
                         const IncludeDirective &) = default;
};

// Non-fatal scanner finding (malformed directive, computed include, ...).
struct ScanDiagnostic {
  int line = 0;
  std::string message;

  friend bool operator==(const ScanDiagnostic &,
                         const ScanDiagnostic &) = default;
};

struct MacroStats {
  int macro_defs = 0;       // #define count, the include guard's excluded
  int decl_lines = 0;       // non-blank, non-comment, non-directive lines
  int conditional_defs = 0; // #define inside a conditional region

  friend bool operator==(const MacroStats &, const MacroStats &) = default;
};

struct ScanResult {
  std::vector<IncludeDirective> directives;
  std::vector<ScanDiagnostic> diagnostics;
  bool has_guard = false; // classic #ifndef/#define guard or #pragma once
  MacroStats macro_stats;
  int line_count = 0; // physical lines in the input
};

// Scans arbitrary bytes as a line sequence. The input need not be valid
// C/C++: directives in comments are ignored, unparseable lines are skipped,
// and malformed directives become diagnostics rather than failures.
ScanResult scan_source(std::string_view text);

// Directive list only; convenience over scan_source.
std::vector<IncludeDirective> scan_includes(std::string_view text);

// Physical line count of a text blob (0 for empty input).
int count_lines(std::string_view text);

} // namespace modmig
