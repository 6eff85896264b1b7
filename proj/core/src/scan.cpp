#include "modmig/scan.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace modmig {

namespace {

// Blanks out // and /* */ comments while preserving newlines and byte
// offsets. String and character literals are tracked so comment markers
// inside them survive (e.g. "http://x").
std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  enum class State { Code, LineComment, BlockComment, StringLit, CharLit };
  State state = State::Code;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    const char next = i + 1 < n ? text[i + 1] : '\0';
    switch (state) {
    case State::Code:
      if (c == '/' && next == '/') {
        state = State::LineComment;
        out += "  ";
        i += 2;
      } else if (c == '/' && next == '*') {
        state = State::BlockComment;
        out += "  ";
        i += 2;
      } else if (c == '"') {
        state = State::StringLit;
        out += c;
        ++i;
      } else if (c == '\'') {
        state = State::CharLit;
        out += c;
        ++i;
      } else {
        out += c;
        ++i;
      }
      break;
    case State::LineComment:
      if (c == '\n') {
        state = State::Code;
        out += c;
      } else {
        out += ' ';
      }
      ++i;
      break;
    case State::BlockComment:
      if (c == '*' && next == '/') {
        state = State::Code;
        out += "  ";
        i += 2;
      } else {
        out += (c == '\n') ? '\n' : ' ';
        ++i;
      }
      break;
    case State::StringLit:
      if (c == '\\' && i + 1 < n) {
        out += c;
        out += text[i + 1];
        i += 2;
      } else {
        if (c == '"' || c == '\n') // unterminated literal: recover at EOL
          state = State::Code;
        out += c;
        ++i;
      }
      break;
    case State::CharLit:
      if (c == '\\' && i + 1 < n) {
        out += c;
        out += text[i + 1];
        i += 2;
      } else {
        if (c == '\'' || c == '\n')
          state = State::Code;
        out += c;
        ++i;
      }
      break;
    }
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t eol = text.find('\n', start);
    if (eol == std::string_view::npos) {
      if (start < text.size())
        lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, eol - start));
    start = eol + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool ends_with_backslash(std::string_view line) {
  const std::string_view t = trim(line);
  return !t.empty() && t.back() == '\\';
}

enum class DirectiveKind {
  Include,
  Define,
  If,
  Ifdef,
  Ifndef,
  Elif,
  Else,
  Endif,
  Pragma,
  Other,
};

struct RawDirective {
  DirectiveKind kind = DirectiveKind::Other;
  int line = 0;
  std::string rest; // payload after the keyword, untrimmed tail
};

DirectiveKind keyword_kind(std::string_view kw) {
  if (kw == "include")
    return DirectiveKind::Include;
  if (kw == "define")
    return DirectiveKind::Define;
  if (kw == "if")
    return DirectiveKind::If;
  if (kw == "ifdef")
    return DirectiveKind::Ifdef;
  if (kw == "ifndef")
    return DirectiveKind::Ifndef;
  if (kw == "elif")
    return DirectiveKind::Elif;
  if (kw == "else")
    return DirectiveKind::Else;
  if (kw == "endif")
    return DirectiveKind::Endif;
  if (kw == "pragma")
    return DirectiveKind::Pragma;
  return DirectiveKind::Other;
}

// Parses "  #  keyword rest" into a directive; nullopt for non-directive
// lines.
std::optional<RawDirective> parse_directive_line(std::string_view line,
                                                 int line_no) {
  size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
    ++i;
  if (i >= line.size() || line[i] != '#')
    return std::nullopt;
  ++i;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
    ++i;
  size_t kw_start = i;
  while (i < line.size() &&
         (std::isalpha(static_cast<unsigned char>(line[i])) || line[i] == '_'))
    ++i;
  RawDirective d;
  d.line = line_no;
  d.kind = keyword_kind(line.substr(kw_start, i - kw_start));
  d.rest = std::string(line.substr(i));
  return d;
}

// First identifier token of a directive payload.
std::string first_identifier(std::string_view rest) {
  size_t i = 0;
  while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i])))
    ++i;
  size_t start = i;
  while (i < rest.size() && (std::isalnum(static_cast<unsigned char>(rest[i])) ||
                             rest[i] == '_'))
    ++i;
  return std::string(rest.substr(start, i - start));
}

// A guard #define must name exactly the guard symbol; a '(' glued to the
// name makes it function-like and disqualifies it.
bool define_names_symbol(std::string_view rest, const std::string &symbol) {
  size_t i = 0;
  while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i])))
    ++i;
  if (rest.substr(i, symbol.size()) != symbol)
    return false;
  const size_t after = i + symbol.size();
  if (after < rest.size()) {
    const char c = rest[after];
    if (c == '(')
      return false;
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
      return false;
  }
  return true;
}

struct GuardInfo {
  bool present = false;
  int ifndef_index = -1; // index into the directive list
  int define_index = -1;
  int endif_index = -1;
};

// Classic guard: the first two directives are `#ifndef X` / `#define X`,
// the matching #endif is the last directive, and no other content leads or
// trails the guarded region.
GuardInfo detect_guard(const std::vector<RawDirective> &directives,
                       const std::vector<int> &decl_line_numbers,
                       int line_count) {
  GuardInfo g;
  if (directives.size() < 3)
    return g;
  const RawDirective &d0 = directives[0];
  const RawDirective &d1 = directives[1];
  const RawDirective &dn = directives.back();
  if (d0.kind != DirectiveKind::Ifndef || d1.kind != DirectiveKind::Define ||
      dn.kind != DirectiveKind::Endif)
    return g;
  const std::string symbol = first_identifier(d0.rest);
  if (symbol.empty() || !define_names_symbol(d1.rest, symbol))
    return g;
  // The final #endif must close d0: depth never returns to zero in between
  // and every inner region is balanced.
  int depth = 0;
  for (size_t i = 0; i + 1 < directives.size(); ++i) {
    switch (directives[i].kind) {
    case DirectiveKind::If:
    case DirectiveKind::Ifdef:
    case DirectiveKind::Ifndef:
      ++depth;
      break;
    case DirectiveKind::Endif:
      --depth;
      if (depth <= 0)
        return g; // guard closed early
      break;
    default:
      break;
    }
  }
  if (depth != 1)
    return g; // unbalanced inner conditionals
  for (int line : decl_line_numbers)
    if (line < d0.line || line > dn.line)
      return g; // content outside the guarded region
  (void)line_count;
  g.present = true;
  g.ifndef_index = 0;
  g.define_index = 1;
  g.endif_index = static_cast<int>(directives.size()) - 1;
  return g;
}

void parse_include_payload(const RawDirective &d, ScanResult &result,
                           bool conditional) {
  std::string_view rest = d.rest;
  size_t i = 0;
  while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i])))
    ++i;
  if (i >= rest.size()) {
    result.diagnostics.push_back({d.line, "#include with no argument"});
    return;
  }
  char open = rest[i];
  char close;
  if (open == '<')
    close = '>';
  else if (open == '"')
    close = '"';
  else {
    result.diagnostics.push_back(
        {d.line, "computed include skipped: " + std::string(trim(rest))});
    return;
  }
  const size_t end = rest.find(close, i + 1);
  if (end == std::string_view::npos) {
    result.diagnostics.push_back(
        {d.line, std::string("malformed #include: missing closing '") + close +
                     "'"});
    return;
  }
  std::string spelled(rest.substr(i + 1, end - i - 1));
  if (spelled.empty()) {
    result.diagnostics.push_back({d.line, "empty include path"});
    return;
  }
  IncludeDirective directive;
  directive.spelled_path = std::move(spelled);
  directive.angle_form = (open == '<');
  directive.line = d.line;
  directive.conditional = conditional;
  result.directives.push_back(std::move(directive));
}

} // namespace

int count_lines(std::string_view text) {
  if (text.empty())
    return 0;
  int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  if (text.back() != '\n')
    ++lines;
  return lines;
}

ScanResult scan_source(std::string_view text) {
  ScanResult result;
  result.line_count = count_lines(text);

  const std::string clean = strip_comments(text);
  const std::vector<std::string_view> lines = split_lines(clean);

  std::vector<RawDirective> directives;
  std::vector<int> decl_line_numbers;
  bool in_directive_continuation = false;
  for (size_t idx = 0; idx < lines.size(); ++idx) {
    const std::string_view line = lines[idx];
    const int line_no = static_cast<int>(idx) + 1;
    if (in_directive_continuation) {
      in_directive_continuation = ends_with_backslash(line);
      continue;
    }
    if (trim(line).empty())
      continue;
    if (auto d = parse_directive_line(line, line_no)) {
      in_directive_continuation = ends_with_backslash(line);
      directives.push_back(std::move(*d));
    } else {
      decl_line_numbers.push_back(line_no);
    }
  }
  result.macro_stats.decl_lines = static_cast<int>(decl_line_numbers.size());

  const GuardInfo guard =
      detect_guard(directives, decl_line_numbers, result.line_count);
  bool pragma_once = false;
  for (const RawDirective &d : directives)
    if (d.kind == DirectiveKind::Pragma && first_identifier(d.rest) == "once")
      pragma_once = true;
  result.has_guard = guard.present || pragma_once;

  int depth = 0;
  for (size_t i = 0; i < directives.size(); ++i) {
    const RawDirective &d = directives[i];
    const bool is_guard_open =
        guard.present && static_cast<int>(i) == guard.ifndef_index;
    const bool is_guard_close =
        guard.present && static_cast<int>(i) == guard.endif_index;
    const bool is_guard_define =
        guard.present && static_cast<int>(i) == guard.define_index;
    switch (d.kind) {
    case DirectiveKind::If:
    case DirectiveKind::Ifdef:
    case DirectiveKind::Ifndef:
      if (!is_guard_open)
        ++depth;
      break;
    case DirectiveKind::Endif:
      if (!is_guard_close)
        depth = std::max(0, depth - 1);
      break;
    case DirectiveKind::Include:
      parse_include_payload(d, result, depth > 0);
      break;
    case DirectiveKind::Define:
      if (!is_guard_define) {
        ++result.macro_stats.macro_defs;
        if (depth > 0)
          ++result.macro_stats.conditional_defs;
      }
      break;
    default:
      break;
    }
  }
  return result;
}

std::vector<IncludeDirective> scan_includes(std::string_view text) {
  return scan_source(text).directives;
}

} // namespace modmig
