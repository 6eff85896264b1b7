#include "modmig/include_graph.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "modmig/error.hpp"

namespace fs = std::filesystem;

namespace modmig {

namespace {

bool edge_less(const Edge &a, const Edge &b) {
  return std::tie(a.from, a.to, a.directive.line, a.directive.spelled_path) <
         std::tie(b.from, b.to, b.directive.line, b.directive.spelled_path);
}

bool unresolved_less(const UnresolvedInclude &a, const UnresolvedInclude &b) {
  return std::tie(a.from, a.directive.line, a.directive.spelled_path) <
         std::tie(b.from, b.directive.line, b.directive.spelled_path);
}

std::optional<std::string> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Everything one worker learns about one file; merged in wave order so the
// result is independent of scheduling.
struct ScanOutcome {
  bool read_failed = false;
  ScanResult scan;
  // parallel to scan.directives: canonical target or nullopt
  std::vector<std::optional<std::string>> targets;
};

ScanOutcome scan_one(const std::string &path, const LibraryManifest &manifest,
                     const BuildOptions &options) {
  ScanOutcome out;
  const std::optional<std::string> text = read_file(path);
  if (!text) {
    out.read_failed = true;
    return out;
  }
  out.scan = scan_source(*text);
  if (options.ignore_conditional_includes) {
    auto &dirs = out.scan.directives;
    dirs.erase(std::remove_if(dirs.begin(), dirs.end(),
                              [](const IncludeDirective &d) {
                                return d.conditional;
                              }),
               dirs.end());
  }
  out.targets.reserve(out.scan.directives.size());
  for (const IncludeDirective &d : out.scan.directives)
    out.targets.push_back(resolve_include(path, d, manifest));
  return out;
}

} // namespace

std::optional<std::string> resolve_include(const std::string &from,
                                           const IncludeDirective &directive,
                                           const LibraryManifest &manifest) {
  std::vector<std::string> candidates;
  if (!directive.angle_form) {
    const fs::path from_dir = fs::path(from).parent_path();
    candidates.push_back(
        canonical_path(directive.spelled_path, from_dir));
  }
  for (const std::string &sp : manifest.search_paths)
    candidates.push_back(canonical_path(directive.spelled_path, sp));
  for (const std::string &c : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(c, ec))
      return c;
  }
  return std::nullopt;
}

IncludeGraph build_graph(const LibraryManifest &manifest,
                         const BuildOptions &options) {
  IncludeGraph graph;

  // Roots: translation units (existence is mandatory) and every interface
  // header of every library, referenced or not.
  std::map<std::string, NodeKind> pending;
  for (const std::string &tu : manifest.tu_roots) {
    if (!fs::is_regular_file(tu))
      throw Error("cannot read translation unit: " + tu);
    pending[tu] = NodeKind::TranslationUnit;
  }
  for (const std::string &h : all_interface_headers(manifest))
    pending.emplace(h, NodeKind::Header); // TU kind wins on overlap

  const int jobs = std::max(1, options.jobs);
  std::set<std::string> tu_set(manifest.tu_roots.begin(),
                               manifest.tu_roots.end());

  while (!pending.empty()) {
    std::vector<std::pair<std::string, NodeKind>> wave(pending.begin(),
                                                       pending.end());
    pending.clear();

    std::vector<ScanOutcome> outcomes(wave.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next.fetch_add(1); i < wave.size();
           i = next.fetch_add(1))
        outcomes[i] = scan_one(wave[i].first, manifest, options);
    };
    if (jobs == 1 || wave.size() == 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      const size_t n = std::min<size_t>(jobs, wave.size());
      threads.reserve(n);
      for (size_t t = 0; t < n; ++t)
        threads.emplace_back(worker);
      for (std::thread &t : threads)
        t.join();
    }

    // Merge in wave (sorted) order; scheduling cannot influence the result.
    for (size_t i = 0; i < wave.size(); ++i) {
      const std::string &path = wave[i].first;
      const ScanOutcome &out = outcomes[i];
      if (out.read_failed) {
        if (tu_set.count(path))
          throw Error("cannot read translation unit: " + path);
        graph.nodes.emplace(path, FileInfo{wave[i].second, 0, false, {}});
        graph.diagnostics.push_back(path + ": cannot read file");
        continue;
      }
      FileInfo info;
      info.kind = wave[i].second;
      info.lines = out.scan.line_count;
      info.has_guard = out.scan.has_guard;
      info.macro_stats = out.scan.macro_stats;
      graph.nodes.insert_or_assign(path, info);

      for (const ScanDiagnostic &d : out.scan.diagnostics)
        graph.diagnostics.push_back(path + ":" + std::to_string(d.line) +
                                    ": " + d.message);
      for (size_t k = 0; k < out.scan.directives.size(); ++k) {
        const IncludeDirective &d = out.scan.directives[k];
        if (out.targets[k]) {
          const std::string &to = *out.targets[k];
          graph.edges.push_back({path, to, d});
          if (!graph.nodes.count(to) && !pending.count(to))
            pending.emplace(to, NodeKind::Header);
        } else {
          graph.unresolved.push_back({path, d});
        }
      }
    }
    // Drop anything merged meanwhile (a header can be discovered twice).
    for (auto it = pending.begin(); it != pending.end();)
      it = graph.nodes.count(it->first) ? pending.erase(it) : std::next(it);
  }

  std::sort(graph.edges.begin(), graph.edges.end(), edge_less);
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()),
                    graph.edges.end());
  std::sort(graph.unresolved.begin(), graph.unresolved.end(), unresolved_less);
  std::sort(graph.diagnostics.begin(), graph.diagnostics.end());
  return graph;
}

std::map<std::string, std::vector<std::string>>
out_neighbours(const IncludeGraph &graph) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto &[path, info] : graph.nodes)
    adj[path];
  for (const Edge &e : graph.edges)
    adj[e.from].push_back(e.to);
  for (auto &[from, tos] : adj) {
    std::sort(tos.begin(), tos.end());
    tos.erase(std::unique(tos.begin(), tos.end()), tos.end());
  }
  return adj;
}

std::set<std::string> transitive_includes(const IncludeGraph &graph,
                                          const std::string &start) {
  if (!graph.nodes.count(start))
    throw Error("unknown graph node: " + start);
  const auto adj = out_neighbours(graph);
  std::set<std::string> visited;
  std::deque<std::string> queue{start};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    auto it = adj.find(cur);
    if (it == adj.end())
      continue;
    for (const std::string &next : it->second)
      if (visited.insert(next).second)
        queue.push_back(next);
  }
  visited.erase(start);
  return visited;
}

std::vector<std::vector<std::string>> find_cycles(const IncludeGraph &graph) {
  // Iterative Tarjan; include graphs can be deep enough to overflow a
  // recursive implementation.
  const auto adj = out_neighbours(graph);
  std::vector<std::string> names;
  names.reserve(adj.size());
  std::map<std::string, int> index_of;
  for (const auto &[name, tos] : adj) {
    index_of[name] = static_cast<int>(names.size());
    names.push_back(name);
  }
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> succ(n);
  std::vector<bool> self_loop(n, false);
  for (int v = 0; v < n; ++v)
    for (const std::string &to : adj.at(names[v])) {
      const int w = index_of.at(to);
      succ[v].push_back(w);
      if (w == v)
        self_loop[v] = true;
    }

  std::vector<int> disc(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int timer = 0, comp_count = 0;
  std::vector<std::vector<int>> components;

  struct Frame {
    int v;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1)
      continue;
    std::vector<Frame> call{{root, 0}};
    disc[root] = low[root] = timer++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame &f = call.back();
      if (f.child < succ[f.v].size()) {
        const int w = succ[f.v][f.child++];
        if (disc[w] == -1) {
          disc[w] = low[w] = timer++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        if (low[f.v] == disc[f.v]) {
          std::vector<int> members;
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = comp_count;
            members.push_back(w);
            if (w == f.v)
              break;
          }
          ++comp_count;
          components.push_back(std::move(members));
        }
        const int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }

  std::vector<std::vector<std::string>> cycles;
  for (const std::vector<int> &members : components) {
    if (members.size() < 2 && !(members.size() == 1 && self_loop[members[0]]))
      continue;
    std::vector<std::string> paths;
    paths.reserve(members.size());
    for (int v : members)
      paths.push_back(names[v]);
    std::sort(paths.begin(), paths.end());
    cycles.push_back(std::move(paths));
  }
  std::sort(cycles.begin(), cycles.end(),
            [](const auto &a, const auto &b) { return a.front() < b.front(); });
  return cycles;
}

namespace {

nlohmann::ordered_json directive_to_json(const IncludeDirective &d) {
  nlohmann::ordered_json j;
  j["spelled"] = d.spelled_path;
  j["angle"] = d.angle_form;
  j["line"] = d.line;
  j["conditional"] = d.conditional;
  return j;
}

IncludeDirective directive_from_json(const nlohmann::json &j) {
  IncludeDirective d;
  d.spelled_path = j.at("spelled").get<std::string>();
  d.angle_form = j.at("angle").get<bool>();
  d.line = j.at("line").get<int>();
  d.conditional = j.at("conditional").get<bool>();
  return d;
}

} // namespace

std::string graph_to_json(const IncludeGraph &graph) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto &[path, info] : graph.nodes) {
    nlohmann::ordered_json nj;
    nj["path"] = path;
    nj["kind"] = info.kind == NodeKind::TranslationUnit ? "tu" : "header";
    nj["lines"] = info.lines;
    nj["has_guard"] = info.has_guard;
    nj["macro_defs"] = info.macro_stats.macro_defs;
    nj["decl_lines"] = info.macro_stats.decl_lines;
    nj["conditional_defs"] = info.macro_stats.conditional_defs;
    j["nodes"].push_back(std::move(nj));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const Edge &e : graph.edges) {
    nlohmann::ordered_json ej;
    ej["from"] = e.from;
    ej["to"] = e.to;
    ej["directive"] = directive_to_json(e.directive);
    j["edges"].push_back(std::move(ej));
  }
  j["unresolved"] = nlohmann::ordered_json::array();
  for (const UnresolvedInclude &u : graph.unresolved) {
    nlohmann::ordered_json uj;
    uj["from"] = u.from;
    uj["directive"] = directive_to_json(u.directive);
    j["unresolved"].push_back(std::move(uj));
  }
  j["diagnostics"] = graph.diagnostics;
  return j.dump(2) + "\n";
}

IncludeGraph graph_from_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(std::string("malformed graph JSON: ") + e.what());
  }
  IncludeGraph graph;
  for (const auto &nj : j.at("nodes")) {
    FileInfo info;
    info.kind = nj.at("kind").get<std::string>() == "tu"
                    ? NodeKind::TranslationUnit
                    : NodeKind::Header;
    info.lines = nj.at("lines").get<int>();
    info.has_guard = nj.at("has_guard").get<bool>();
    info.macro_stats.macro_defs = nj.at("macro_defs").get<int>();
    info.macro_stats.decl_lines = nj.at("decl_lines").get<int>();
    info.macro_stats.conditional_defs = nj.at("conditional_defs").get<int>();
    graph.nodes.emplace(nj.at("path").get<std::string>(), info);
  }
  for (const auto &ej : j.at("edges"))
    graph.edges.push_back({ej.at("from").get<std::string>(),
                           ej.at("to").get<std::string>(),
                           directive_from_json(ej.at("directive"))});
  for (const auto &uj : j.at("unresolved"))
    graph.unresolved.push_back({uj.at("from").get<std::string>(),
                                directive_from_json(uj.at("directive"))});
  for (const auto &d : j.at("diagnostics"))
    graph.diagnostics.push_back(d.get<std::string>());
  return graph;
}

} // namespace modmig
