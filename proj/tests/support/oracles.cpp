#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <regex>

namespace testsupport {

std::vector<modmig::IncludeDirective> reference_scan(const std::string &text) {
  // Remove comments with a character loop distinct in structure from the
  // implementation (single pass, no state enum).
  std::string clean;
  clean.reserve(text.size());
  bool in_line = false, in_block = false, in_str = false, in_chr = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const char d = i + 1 < text.size() ? text[i + 1] : '\0';
    if (in_line) {
      clean += c == '\n' ? '\n' : ' ';
      if (c == '\n')
        in_line = false;
    } else if (in_block) {
      if (c == '*' && d == '/') {
        clean += "  ";
        ++i;
        in_block = false;
      } else {
        clean += c == '\n' ? '\n' : ' ';
      }
    } else if (in_str) {
      clean += c;
      if (c == '\\') {
        if (i + 1 < text.size())
          clean += text[++i];
      } else if (c == '"' || c == '\n') {
        in_str = false;
      }
    } else if (in_chr) {
      clean += c;
      if (c == '\\') {
        if (i + 1 < text.size())
          clean += text[++i];
      } else if (c == '\'' || c == '\n') {
        in_chr = false;
      }
    } else if (c == '/' && d == '/') {
      clean += "  ";
      ++i;
      in_line = true;
    } else if (c == '/' && d == '*') {
      clean += "  ";
      ++i;
      in_block = true;
    } else {
      clean += c;
      if (c == '"')
        in_str = true;
      else if (c == '\'')
        in_chr = true;
    }
  }

  static const std::regex include_re(
      R"(^\s*#\s*include\s*(<([^>]*)>|"([^"]*)"))");
  static const std::regex cond_open_re(R"(^\s*#\s*(if|ifdef|ifndef)\b)");
  static const std::regex cond_close_re(R"(^\s*#\s*endif\b)");
  static const std::regex ifndef_re(R"(^\s*#\s*ifndef\s+([A-Za-z_]\w*))");
  static const std::regex define_re(R"(^\s*#\s*define\s+([A-Za-z_]\w*)(\b|$))");
  static const std::regex directive_re(R"(^\s*#)");
  static const std::regex blank_re(R"(^\s*$)");

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : clean) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty())
      lines.push_back(cur);
  }

  // Guard: first directive #ifndef X, second #define X (same X), last an
  // #endif with nothing after it.
  int guard_open_line = -1;
  {
    std::vector<std::pair<int, std::string>> directive_lines;
    for (size_t i = 0; i < lines.size(); ++i)
      if (std::regex_search(lines[i], directive_re))
        directive_lines.push_back({static_cast<int>(i) + 1, lines[i]});
    std::smatch m0, m1;
    if (directive_lines.size() >= 3 &&
        std::regex_search(directive_lines[0].second, m0, ifndef_re) &&
        std::regex_search(directive_lines[1].second, m1, define_re) &&
        m0[1].str() == m1[1].str() &&
        std::regex_search(directive_lines.back().second, cond_close_re)) {
      bool tail_clean = true;
      for (size_t i = directive_lines.back().first; i < lines.size(); ++i)
        if (!std::regex_search(lines[i], blank_re))
          tail_clean = false;
      for (int i = 0; i + 1 < directive_lines[0].first; ++i)
        if (!std::regex_search(lines[i], blank_re))
          tail_clean = false;
      int depth = 0;
      bool closes_early = false;
      for (size_t i = 0; i + 1 < directive_lines.size(); ++i) {
        if (std::regex_search(directive_lines[i].second, cond_open_re))
          ++depth;
        else if (std::regex_search(directive_lines[i].second, cond_close_re)) {
          --depth;
          if (depth <= 0)
            closes_early = true;
        }
      }
      if (tail_clean && !closes_early && depth == 1)
        guard_open_line = directive_lines[0].first;
    }
  }

  std::vector<modmig::IncludeDirective> out;
  int depth = 0;
  bool continuation = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    const int line_no = static_cast<int>(i) + 1;
    if (continuation) {
      const auto t = line.find_last_not_of(" \t\r");
      continuation = t != std::string::npos && line[t] == '\\';
      continue;
    }
    const bool is_directive = std::regex_search(line, directive_re);
    if (is_directive) {
      const auto t = line.find_last_not_of(" \t\r");
      continuation = t != std::string::npos && line[t] == '\\';
    }
    std::smatch m;
    if (std::regex_search(line, m, include_re)) {
      modmig::IncludeDirective d;
      d.angle_form = m[2].matched;
      d.spelled_path = d.angle_form ? m[2].str() : m[3].str();
      d.line = line_no;
      d.conditional = depth > 0;
      if (!d.spelled_path.empty())
        out.push_back(std::move(d));
    } else if (std::regex_search(line, cond_open_re)) {
      if (line_no != guard_open_line)
        ++depth;
    } else if (std::regex_search(line, cond_close_re)) {
      // the guard's matching #endif is the file's last directive; when a
      // guard was recognized it never decrements because its open was
      // skipped, keeping inner regions aligned
      if (!(guard_open_line > 0 && depth == 0))
        depth = std::max(0, depth - 1);
    }
  }
  return out;
}

std::set<std::string> closure_fixed_point(const std::vector<StringEdge> &edges,
                                          const std::string &start) {
  std::set<std::string> reach;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &[from, to] : edges) {
      if ((from == start || reach.count(from)) && !reach.count(to)) {
        reach.insert(to);
        changed = true;
      }
    }
  }
  reach.erase(start);
  return reach;
}

namespace {

std::map<std::string, std::set<std::string>>
reach_matrix(const std::set<std::string> &nodes,
             const std::vector<StringEdge> &edges) {
  std::map<std::string, std::set<std::string>> reach;
  for (const std::string &n : nodes)
    reach[n] = {};
  for (const auto &[from, to] : edges)
    reach[from].insert(to);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const std::string &a : nodes)
      for (const std::string &b : std::set<std::string>(reach[a]))
        for (const std::string &c : reach[b])
          if (reach[a].insert(c).second)
            changed = true;
  }
  return reach;
}

} // namespace

std::vector<std::vector<std::string>>
brute_sccs(const std::set<std::string> &nodes,
           const std::vector<StringEdge> &edges) {
  const auto reach = reach_matrix(nodes, edges);
  std::set<std::string> assigned;
  std::vector<std::vector<std::string>> components;
  for (const std::string &a : nodes) {
    if (assigned.count(a))
      continue;
    std::vector<std::string> comp{a};
    for (const std::string &b : nodes)
      if (b != a && reach.at(a).count(b) && reach.at(b).count(a))
        comp.push_back(b);
    if (comp.size() >= 2 || reach.at(a).count(a)) {
      for (const std::string &m : comp)
        assigned.insert(m);
      std::sort(comp.begin(), comp.end());
      components.push_back(std::move(comp));
    }
  }
  std::sort(components.begin(), components.end(),
            [](const auto &x, const auto &y) { return x.front() < y.front(); });
  return components;
}

bool is_acyclic(const std::set<std::string> &nodes,
                const std::vector<StringEdge> &edges) {
  std::map<std::string, int> indeg;
  std::map<std::string, std::vector<std::string>> adj;
  for (const std::string &n : nodes)
    indeg[n] = 0;
  for (const auto &[from, to] : edges) {
    adj[from].push_back(to);
    ++indeg[to];
  }
  std::vector<std::string> ready;
  for (const auto &[n, d] : indeg)
    if (d == 0)
      ready.push_back(n);
  size_t emitted = 0;
  while (!ready.empty()) {
    const std::string n = ready.back();
    ready.pop_back();
    ++emitted;
    for (const std::string &w : adj[n])
      if (--indeg[w] == 0)
        ready.push_back(w);
  }
  return emitted == nodes.size();
}

std::optional<std::vector<StringEdge>>
brute_min_feedback(const std::set<std::string> &nodes,
                   const std::vector<StringEdge> &edges) {
  std::vector<StringEdge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const size_t e = sorted.size();
  for (size_t k = 0; k <= e; ++k) {
    std::vector<size_t> combo(k);
    // combinations in lexicographic order
    std::function<std::optional<std::vector<StringEdge>>(size_t, size_t)> pick =
        [&](size_t slot, size_t from) -> std::optional<std::vector<StringEdge>> {
      if (slot == k) {
        std::vector<StringEdge> kept;
        size_t c = 0;
        for (size_t i = 0; i < e; ++i) {
          if (c < k && combo[c] == i) {
            ++c;
            continue;
          }
          kept.push_back(sorted[i]);
        }
        if (is_acyclic(nodes, kept)) {
          std::vector<StringEdge> removed;
          for (size_t i : combo)
            removed.push_back(sorted[i]);
          return removed;
        }
        return std::nullopt;
      }
      for (size_t i = from; i < e; ++i) {
        combo[slot] = i;
        if (auto r = pick(slot + 1, i + 1))
          return r;
      }
      return std::nullopt;
    };
    if (auto r = pick(0, 0))
      return r;
  }
  return std::nullopt;
}

std::map<std::string, int>
brute_duplication_counts(const std::set<std::string> &headers,
                         const std::vector<StringEdge> &edges,
                         const std::map<std::string, std::string> &assignment) {
  std::set<std::string> modules;
  for (const auto &[h, m] : assignment)
    modules.insert(m);
  std::map<std::string, int> counts;
  for (const std::string &h : headers) {
    if (assignment.count(h)) {
      counts[h] = 1;
      continue;
    }
    int c = 0;
    for (const std::string &m : modules) {
      bool includes = false;
      for (const auto &[g, gm] : assignment)
        if (gm == m && closure_fixed_point(edges, g).count(h))
          includes = true;
      if (includes)
        ++c;
    }
    counts[h] = c;
  }
  return counts;
}

std::map<std::pair<std::string, std::string>, int>
brute_module_edges(const std::vector<StringEdge> &edges,
                   const std::map<std::string, std::string> &assignment) {
  std::vector<StringEdge> dedup(edges.begin(), edges.end());
  std::sort(dedup.begin(), dedup.end());
  dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
  std::map<std::pair<std::string, std::string>, int> out;
  for (const auto &[f, t] : dedup) {
    auto fa = assignment.find(f);
    auto ta = assignment.find(t);
    if (fa == assignment.end() || ta == assignment.end())
      continue;
    if (fa->second == ta->second)
      continue;
    ++out[{fa->second, ta->second}];
  }
  return out;
}

} // namespace testsupport
