#include "modmig/sanitizer.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <regex>
#include <thread>

#include <json.hpp>

#include "modmig/error.hpp"

namespace modmig {

std::string to_string(Classification c) {
  switch (c) {
  case Classification::Standalone:
    return "standalone";
  case Classification::Incomplete:
    return "incomplete";
  case Classification::Broken:
    return "broken";
  case Classification::Cyclic:
    return "cyclic";
  case Classification::Macro:
    return "macro";
  case Classification::TokenGenerating:
    return "token_generating";
  }
  return "standalone";
}

Classification classification_from_string(const std::string &s) {
  if (s == "standalone")
    return Classification::Standalone;
  if (s == "incomplete")
    return Classification::Incomplete;
  if (s == "broken")
    return Classification::Broken;
  if (s == "cyclic")
    return Classification::Cyclic;
  if (s == "macro")
    return Classification::Macro;
  if (s == "token_generating")
    return Classification::TokenGenerating;
  throw Error("unknown classification: " + s);
}

std::vector<HeaderRecord> collect_records(const IncludeGraph &graph,
                                          const LibraryManifest &manifest) {
  std::vector<HeaderRecord> records;
  for (const std::string &h : all_interface_headers(manifest)) {
    auto it = graph.nodes.find(h);
    if (it == graph.nodes.end())
      throw Error("interface header missing from graph: " + h);
    HeaderRecord r;
    r.path = h;
    r.has_guard = it->second.has_guard;
    r.macro_stats = it->second.macro_stats;
    records.push_back(std::move(r));
  }
  return records; // all_interface_headers is already sorted
}

std::set<std::string> detect_broken(const IncludeGraph &graph,
                                    const LibraryManifest &manifest) {
  const auto adj = out_neighbours(graph);
  std::set<std::string> reached;
  std::deque<std::string> queue;
  for (const std::string &tu : manifest.tu_roots)
    if (graph.nodes.count(tu))
      queue.push_back(tu);
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    auto it = adj.find(cur);
    if (it == adj.end())
      continue;
    for (const std::string &next : it->second)
      if (reached.insert(next).second)
        queue.push_back(next);
  }
  const std::set<std::string> tu_set(manifest.tu_roots.begin(),
                                     manifest.tu_roots.end());
  std::set<std::string> broken;
  for (const std::string &h : all_interface_headers(manifest))
    if (!reached.count(h) && !tu_set.count(h))
      broken.insert(h);
  return broken;
}

namespace {

double macro_ratio(const MacroStats &s) {
  return static_cast<double>(s.macro_defs) /
         static_cast<double>(std::max(1, s.macro_defs + s.decl_lines));
}

} // namespace

std::set<std::string> detect_macro_headers(
    const std::vector<HeaderRecord> &records,
    const ClassificationOverrides &overrides) {
  std::set<std::string> macro;
  for (const HeaderRecord &r : records) {
    if (overrides.force_textual.count(r.path) ||
        macro_ratio(r.macro_stats) >= overrides.macro_ratio_threshold)
      macro.insert(r.path);
  }
  return macro;
}

std::vector<HeaderRecord> classify_headers(
    const IncludeGraph &graph, const LibraryManifest &manifest,
    std::vector<HeaderRecord> records,
    const std::vector<std::vector<std::string>> &sccs,
    const std::map<std::string, CompileCheckResult> &compile_results,
    const ClassificationOverrides &overrides) {
  const std::set<std::string> broken = detect_broken(graph, manifest);
  const std::set<std::string> macro = detect_macro_headers(records, overrides);

  std::map<std::string, int> scc_of;
  for (size_t i = 0; i < sccs.size(); ++i)
    for (const std::string &member : sccs[i])
      scc_of[member] = static_cast<int>(i);

  // Headers included more than once by a single file; together with missing
  // guards and macro definitions this hints at token-generating use.
  std::map<std::pair<std::string, std::string>, int> pair_count;
  for (const Edge &e : graph.edges)
    ++pair_count[{e.from, e.to}];
  std::set<std::string> multi_included;
  for (const auto &[pair, count] : pair_count)
    if (count > 1)
      multi_included.insert(pair.second);

  for (HeaderRecord &r : records) {
    r.evidence.clear();
    r.scc_id = -1;
    if (overrides.force_exclude.count(r.path)) {
      r.classification = Classification::TokenGenerating;
      r.evidence.push_back("listed in force_exclude");
    } else if (overrides.force_textual.count(r.path)) {
      r.classification = Classification::Macro;
      r.evidence.push_back("listed in force_textual");
    } else if (auto it = scc_of.find(r.path); it != scc_of.end()) {
      r.classification = Classification::Cyclic;
      r.scc_id = it->second;
      std::string members;
      for (const std::string &m : sccs[it->second]) {
        if (!members.empty())
          members += ", ";
        members += m;
      }
      r.evidence.push_back("member of include cycle: " + members);
    } else if (broken.count(r.path)) {
      r.classification = Classification::Broken;
      r.evidence.push_back("never included from any translation unit");
    } else if (macro.count(r.path)) {
      r.classification = Classification::Macro;
      r.evidence.push_back(
          "macro ratio " + std::to_string(macro_ratio(r.macro_stats)) +
          " (defines " + std::to_string(r.macro_stats.macro_defs) +
          ", declaration lines " + std::to_string(r.macro_stats.decl_lines) +
          ")");
    } else {
      auto it = compile_results.find(r.path);
      if (it == compile_results.end()) {
        r.classification = Classification::Standalone;
        r.evidence.push_back("unchecked");
      } else if (!it->second.succeeded) {
        r.classification = Classification::Incomplete;
        if (it->second.missing_includes.empty()) {
          r.evidence.push_back("standalone compile failed");
        } else {
          for (const std::string &m : it->second.missing_includes)
            r.evidence.push_back("missing include: " + m);
        }
      } else {
        r.classification = Classification::Standalone;
      }
    }
    if (!r.has_guard && r.macro_stats.macro_defs > 0 &&
        multi_included.count(r.path))
      r.evidence.push_back("warning: possible token-generating header "
                           "(no guard, defines macros, included repeatedly "
                           "by a single file); use force_exclude to confirm");
  }
  return records;
}

namespace {

std::string replace_all(std::string text, const std::string &needle,
                        const std::string &replacement) {
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

std::string mangle_for_output(const std::string &header) {
  std::string out;
  for (char c : header)
    out += (c == '/' || c == '.') ? '_' : c;
  return out;
}

} // namespace

std::vector<CheckCommand> standalone_check_plan(
    std::vector<std::string> headers, const std::string &command_template,
    const std::string &out_dir) {
  if (command_template.find("{header}") == std::string::npos)
    throw Error("check command template must contain {header}");
  std::sort(headers.begin(), headers.end());
  headers.erase(std::unique(headers.begin(), headers.end()), headers.end());
  std::vector<CheckCommand> plan;
  plan.reserve(headers.size());
  for (const std::string &h : headers) {
    std::string cmd = replace_all(command_template, "{header}", h);
    if (cmd.find("{out}") != std::string::npos) {
      const std::string out = out_dir.empty()
                                  ? h + ".pcm"
                                  : out_dir + "/" + mangle_for_output(h) +
                                        ".pcm";
      cmd = replace_all(cmd, "{out}", out);
    }
    plan.push_back({h, std::move(cmd)});
  }
  return plan;
}

std::string default_missing_include_pattern() {
  // Matches "fatal error: 'X.h' file not found" and include-what-you-use
  // style suggestion lines ("#include <x.h>  // for foo").
  return R"(['"<]([^'">]+)['">] file not found|#include\s+["<]([^">]+)[">]\s*//\s*for)";
}

namespace {

std::vector<std::string> parse_missing_includes(const std::string &output,
                                                const std::regex &pattern) {
  std::vector<std::string> missing;
  std::string line;
  size_t start = 0;
  while (start <= output.size()) {
    const size_t eol = output.find('\n', start);
    line = output.substr(start, eol == std::string::npos ? std::string::npos
                                                         : eol - start);
    std::smatch m;
    if (std::regex_search(line, m, pattern)) {
      for (size_t g = 1; g < m.size(); ++g) {
        if (m[g].matched && m[g].length() > 0) {
          const std::string path = m[g].str();
          if (std::find(missing.begin(), missing.end(), path) ==
              missing.end())
            missing.push_back(path);
          break;
        }
      }
    }
    if (eol == std::string::npos)
      break;
    start = eol + 1;
  }
  return missing;
}

} // namespace

std::vector<CompileCheckResult> run_standalone_checks(
    const std::vector<CheckCommand> &plan, const CommandExecutor &executor,
    int parallelism, const std::string &missing_include_pattern) {
  if (parallelism < 1)
    throw Error("parallelism must be positive");
  std::regex pattern;
  try {
    pattern = std::regex(missing_include_pattern);
  } catch (const std::regex_error &e) {
    throw Error(std::string("invalid missing-include pattern: ") + e.what());
  }

  std::vector<CompileCheckResult> results(plan.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < plan.size();
         i = next.fetch_add(1)) {
      CompileCheckResult r;
      r.header = plan[i].header;
      try {
        const ExecResult exec = executor(plan[i]);
        r.succeeded = exec.exit_code == 0;
        r.raw_diagnostics = exec.output;
        if (!r.succeeded)
          r.missing_includes = parse_missing_includes(exec.output, pattern);
      } catch (const std::exception &e) {
        r.succeeded = false;
        r.raw_diagnostics = std::string("spawn-failed: ") + e.what();
      }
      results[i] = std::move(r);
    }
  };
  const size_t n = std::min<size_t>(parallelism, std::max<size_t>(plan.size(), 1));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n);
    for (size_t t = 0; t < n; ++t)
      threads.emplace_back(worker);
    for (std::thread &t : threads)
      t.join();
  }
  return results;
}

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

bool acyclic(int n, const EdgeList &edges) {
  std::vector<std::vector<int>> adj(n);
  std::vector<int> indeg(n, 0);
  for (const auto &[u, v] : edges) {
    if (u == v)
      return false;
    adj[u].push_back(v);
    ++indeg[v];
  }
  std::deque<int> queue;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0)
      queue.push_back(v);
  int seen = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    ++seen;
    for (int w : adj[v])
      if (--indeg[w] == 0)
        queue.push_back(w);
  }
  return seen == n;
}

// All simple cycles, as edge-index sets, capped to keep the greedy path
// bounded on dense components.
void enumerate_cycles(int n, const EdgeList &edges,
                      std::vector<std::vector<int>> &cycles, size_t cap) {
  std::vector<std::vector<std::pair<int, int>>> adj(n); // (target, edge idx)
  for (size_t i = 0; i < edges.size(); ++i)
    adj[edges[i].first].push_back({edges[i].second, static_cast<int>(i)});

  std::vector<int> path_edges;
  std::vector<bool> on_path(n, false);
  // Only cycles whose smallest vertex is `start` are emitted, so each simple
  // cycle appears exactly once.
  std::function<void(int, int)> dfs = [&](int start, int v) {
    if (cycles.size() >= cap)
      return;
    on_path[v] = true;
    for (const auto &[w, idx] : adj[v]) {
      if (cycles.size() >= cap)
        break;
      if (w == start) {
        path_edges.push_back(idx);
        cycles.push_back(path_edges);
        path_edges.pop_back();
      } else if (w > start && !on_path[w]) {
        path_edges.push_back(idx);
        dfs(start, w);
        path_edges.pop_back();
      }
    }
    on_path[v] = false;
  };
  for (int start = 0; start < n && cycles.size() < cap; ++start)
    dfs(start, start);
}

} // namespace

std::vector<BreakSuggestion>
suggest_cycle_breaks(const IncludeGraph &graph,
                     const std::set<std::string> &scc) {
  if (scc.size() < 2)
    throw Error("cycle-break suggestions require a component with at least "
                "two headers");
  std::vector<std::string> members(scc.begin(), scc.end());
  std::map<std::string, int> index_of;
  for (size_t i = 0; i < members.size(); ++i)
    index_of[members[i]] = static_cast<int>(i);

  // Distinct internal edges, sorted by (from, to) for tie-breaking.
  std::set<std::pair<std::string, std::string>> seen;
  for (const Edge &e : graph.edges)
    if (scc.count(e.from) && scc.count(e.to))
      seen.insert({e.from, e.to});
  EdgeList edges;
  std::vector<std::pair<std::string, std::string>> edge_names(seen.begin(),
                                                              seen.end());
  for (const auto &[from, to] : edge_names)
    edges.push_back({index_of.at(from), index_of.at(to)});
  const int n = static_cast<int>(members.size());

  auto removal_acyclifies = [&](const std::vector<int> &removed) {
    EdgeList rest;
    size_t r = 0;
    for (size_t i = 0; i < edges.size(); ++i) {
      if (r < removed.size() && removed[r] == static_cast<int>(i)) {
        ++r;
        continue;
      }
      rest.push_back(edges[i]);
    }
    return acyclic(n, rest);
  };

  std::vector<int> chosen;
  if (edges.size() <= 10) {
    // Exhaustive: first hit over subsets enumerated by ascending size, in
    // lexicographic order over the sorted edge list, is the minimum set with
    // the required tie-break.
    const int e = static_cast<int>(edges.size());
    bool found = false;
    for (int k = 0; k <= e && !found; ++k) {
      std::vector<int> combo(k);
      std::function<bool(int, int)> pick = [&](int slot, int from) {
        if (slot == k)
          return removal_acyclifies(combo);
        for (int i = from; i < e; ++i) {
          combo[slot] = i;
          if (pick(slot + 1, i + 1))
            return true;
        }
        return false;
      };
      if (pick(0, 0)) {
        chosen = combo;
        found = true;
      }
    }
  } else {
    // Greedy: repeatedly drop the edge lying on the most known simple
    // cycles, ties resolved lexicographically.
    std::vector<bool> removed(edges.size(), false);
    while (true) {
      EdgeList rest;
      std::vector<int> rest_index;
      for (size_t i = 0; i < edges.size(); ++i)
        if (!removed[i]) {
          rest.push_back(edges[i]);
          rest_index.push_back(static_cast<int>(i));
        }
      if (acyclic(n, rest))
        break;
      std::vector<std::vector<int>> cycles;
      enumerate_cycles(n, rest, cycles, 20000);
      std::vector<int> frequency(rest.size(), 0);
      for (const std::vector<int> &cycle : cycles)
        for (int idx : cycle)
          ++frequency[idx];
      int best = -1;
      for (size_t i = 0; i < rest.size(); ++i)
        if (best < 0 || frequency[i] > frequency[best])
          best = static_cast<int>(i); // rest is (from,to)-sorted: first max wins ties
      removed[rest_index[best]] = true;
      chosen.push_back(rest_index[best]);
    }
    std::sort(chosen.begin(), chosen.end());
  }

  std::vector<BreakSuggestion> suggestions;
  suggestions.reserve(chosen.size());
  for (int idx : chosen)
    suggestions.push_back({edge_names[idx].first, edge_names[idx].second,
                           "replace include with forward declaration"});
  return suggestions;
}

std::string records_to_json(const std::vector<HeaderRecord> &records) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const HeaderRecord &r : records) {
    nlohmann::ordered_json rj;
    rj["path"] = r.path;
    rj["has_guard"] = r.has_guard;
    rj["macro_stats"] = {{"macro_defs", r.macro_stats.macro_defs},
                         {"decl_lines", r.macro_stats.decl_lines},
                         {"conditional_defs", r.macro_stats.conditional_defs}};
    rj["classification"] = to_string(r.classification);
    rj["evidence"] = r.evidence;
    rj["scc_id"] = r.scc_id;
    j.push_back(std::move(rj));
  }
  return j.dump(2) + "\n";
}

std::vector<HeaderRecord> records_from_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(std::string("malformed header records JSON: ") + e.what());
  }
  std::vector<HeaderRecord> records;
  for (const auto &rj : j) {
    HeaderRecord r;
    r.path = rj.at("path").get<std::string>();
    r.has_guard = rj.at("has_guard").get<bool>();
    const auto &ms = rj.at("macro_stats");
    r.macro_stats.macro_defs = ms.at("macro_defs").get<int>();
    r.macro_stats.decl_lines = ms.at("decl_lines").get<int>();
    r.macro_stats.conditional_defs = ms.at("conditional_defs").get<int>();
    r.classification =
        classification_from_string(rj.at("classification").get<std::string>());
    for (const auto &e : rj.at("evidence"))
      r.evidence.push_back(e.get<std::string>());
    r.scc_id = rj.at("scc_id").get<int>();
    records.push_back(std::move(r));
  }
  return records;
}

} // namespace modmig
