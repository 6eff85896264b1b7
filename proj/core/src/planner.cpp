#include "modmig/planner.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include <json.hpp>

#include "modmig/error.hpp"

namespace modmig {

namespace {

// Reachability from a set of seeds (seeds excluded unless re-reached).
std::set<std::string>
multi_source_closure(const std::map<std::string, std::vector<std::string>> &adj,
                     const std::vector<std::string> &seeds) {
  std::set<std::string> visited;
  std::deque<std::string> queue(seeds.begin(), seeds.end());
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
  return visited;
}

bool segment_prefix(const std::string &path, const std::string &prefix) {
  if (prefix.empty())
    return false;
  std::string p = prefix;
  while (p.size() > 1 && p.back() == '/')
    p.pop_back();
  if (p == "/")
    return !path.empty() && path.front() == '/';
  return path == p || path.compare(0, p.size() + 1, p + "/") == 0;
}

} // namespace

ModuleAssignment assignment_from_modulemap(const ModulemapDocument &doc,
                                           const std::string &root_dir) {
  ModuleAssignment assignment;
  for (const ModuleDef &mod : doc.modules)
    for (const HeaderEntry &e : mod.entries)
      if (e.kind == HeaderEntryKind::Normal)
        assignment.header_to_module[canonical_path(e.header_path, root_dir)] =
            mod.name;
  return assignment;
}

ModuleDepGraph module_dependency_graph(const IncludeGraph &graph,
                                       const ModuleAssignment &assignment) {
  for (const auto &[header, module] : assignment.header_to_module)
    if (!graph.nodes.count(header))
      throw Error("assignment references unknown header: " + header);

  ModuleDepGraph dep;
  for (const auto &[header, module] : assignment.header_to_module)
    dep.nodes.insert(module);
  for (const std::string &ext : assignment.external_modules)
    if (dep.nodes.count(ext))
      dep.externals.insert(ext);

  // Multiplicity counts distinct (from-header, to-header) pairs.
  std::set<std::tuple<std::string, std::string, std::string, std::string>>
      pairs;
  for (const Edge &e : graph.edges) {
    auto from_it = assignment.header_to_module.find(e.from);
    auto to_it = assignment.header_to_module.find(e.to);
    if (from_it == assignment.header_to_module.end() ||
        to_it == assignment.header_to_module.end())
      continue;
    if (from_it->second == to_it->second)
      continue;
    pairs.insert({from_it->second, to_it->second, e.from, e.to});
  }
  for (const auto &[a, b, f, t] : pairs)
    ++dep.edges[{a, b}];
  return dep;
}

DuplicationReport
duplication_report(const IncludeGraph &graph,
                   const ModuleAssignment &assignment,
                   const std::map<std::string, int> &line_counts) {
  const auto adj = out_neighbours(graph);

  std::map<std::string, std::vector<std::string>> module_headers;
  for (const auto &[header, module] : assignment.header_to_module)
    module_headers[module].push_back(header);

  // Per-module transitive closure over the raw include graph.
  std::map<std::string, std::set<std::string>> closures;
  for (const auto &[module, headers] : module_headers)
    closures[module] = multi_source_closure(adj, headers);

  DuplicationReport report;
  for (const auto &[path, info] : graph.nodes) {
    if (info.kind != NodeKind::Header)
      continue;
    auto lc = line_counts.find(path);
    if (lc == line_counts.end())
      throw Error("line count missing for header: " + path);
    DuplicationRow row;
    row.path = path;
    row.lines = lc->second;
    if (assignment.header_to_module.count(path)) {
      row.duplication_count = 1; // persisted once, in its own module
    } else {
      for (const auto &[module, closure] : closures)
        if (closure.count(path))
          ++row.duplication_count;
    }
    row.duplicated_lines =
        static_cast<long long>(row.duplication_count) * row.lines;
    report.total_duplicated_lines += row.duplicated_lines;
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const DuplicationRow &a, const DuplicationRow &b) {
              if (a.duplicated_lines != b.duplicated_lines)
                return a.duplicated_lines > b.duplicated_lines;
              return a.path < b.path;
            });
  return report;
}

std::map<std::string, std::set<std::string>>
detect_external_candidates(const IncludeGraph &graph,
                           const LibraryManifest &manifest,
                           const ModuleAssignment &assignment) {
  const auto adj = out_neighbours(graph);
  std::vector<std::string> mapped;
  for (const auto &[header, module] : assignment.header_to_module)
    mapped.push_back(header);
  const std::set<std::string> reachable = multi_source_closure(adj, mapped);

  std::set<std::string> owned;
  for (const std::string &h : all_interface_headers(manifest))
    owned.insert(h);
  for (const std::string &tu : manifest.tu_roots)
    owned.insert(tu);

  std::map<std::string, std::set<std::string>> groups;
  for (const std::string &path : reachable) {
    if (owned.count(path) || assignment.header_to_module.count(path))
      continue;
    for (const std::string &root : manifest.search_paths) {
      if (segment_prefix(path, root)) {
        groups[root].insert(path);
        break;
      }
    }
  }
  return groups;
}

ModuleAssignment extend_with_externals(
    ModuleAssignment assignment,
    const std::map<std::string, std::set<std::string>> &external_groups) {
  for (const auto &[root, headers] : external_groups) {
    const std::string name = "external:" + root;
    assignment.external_modules.insert(name);
    for (const std::string &h : headers)
      assignment.header_to_module.emplace(h, name);
  }
  return assignment;
}

MigrationPlan bottom_up_order(const ModuleDepGraph &dep) {
  std::vector<std::string> names(dep.nodes.begin(), dep.nodes.end());
  std::map<std::string, int> index_of;
  for (size_t i = 0; i < names.size(); ++i)
    index_of[names[i]] = static_cast<int>(i);
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> succ(n);
  for (const auto &[edge, mult] : dep.edges) {
    auto a = index_of.find(edge.first);
    auto b = index_of.find(edge.second);
    if (a == index_of.end() || b == index_of.end())
      throw Error("dependency edge references unknown module: " +
                  edge.first + " -> " + edge.second);
    succ[a->second].push_back(b->second);
  }

  // Tarjan; module graphs are small, recursion is fine.
  std::vector<int> disc(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int timer = 0, comp_count = 0;
  std::function<void(int)> dfs = [&](int v) {
    disc[v] = low[v] = timer++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : succ[v]) {
      if (disc[w] == -1) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], disc[w]);
      }
    }
    if (low[v] == disc[v]) {
      while (true) {
        const int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = comp_count;
        if (w == v)
          break;
      }
      ++comp_count;
    }
  };
  for (int v = 0; v < n; ++v)
    if (disc[v] == -1)
      dfs(v);

  std::vector<std::vector<int>> comp_members(comp_count);
  for (int v = 0; v < n; ++v)
    comp_members[comp[v]].push_back(v);
  std::vector<std::set<int>> comp_succ(comp_count);
  for (int v = 0; v < n; ++v)
    for (int w : succ[v])
      if (comp[v] != comp[w])
        comp_succ[comp[v]].insert(comp[w]);

  // rank = dependency depth: 0 for leaves, 1 + max over dependencies.
  std::vector<int> rank(comp_count, -1);
  std::function<int(int)> rank_of = [&](int c) {
    if (rank[c] != -1)
      return rank[c];
    int r = 0;
    for (int s : comp_succ[c])
      r = std::max(r, rank_of(s) + 1);
    return rank[c] = r;
  };
  for (int c = 0; c < comp_count; ++c)
    rank_of(c);

  struct Group {
    int rank;
    bool external;
    std::vector<std::string> members; // sorted
  };
  std::vector<Group> groups;
  groups.reserve(comp_count);
  for (int c = 0; c < comp_count; ++c) {
    Group g;
    g.rank = rank[c];
    g.external = true;
    for (int v : comp_members[c]) {
      g.members.push_back(names[v]);
      if (!dep.externals.count(names[v]))
        g.external = false;
    }
    std::sort(g.members.begin(), g.members.end());
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(), [](const Group &a, const Group &b) {
    if (a.rank != b.rank)
      return a.rank < b.rank;
    if (a.external != b.external)
      return a.external; // externals first within a rank
    return a.members.front() < b.members.front();
  });

  MigrationPlan plan;
  for (const Group &g : groups) {
    plan.order.insert(plan.order.end(), g.members.begin(), g.members.end());
    if (g.members.size() >= 2)
      plan.cycle_groups.push_back(g.members);
  }

  // True when every external pseudo-module precedes every internal module.
  int last_external = -1, first_internal = static_cast<int>(plan.order.size());
  for (size_t i = 0; i < plan.order.size(); ++i) {
    if (dep.externals.count(plan.order[i]))
      last_external = static_cast<int>(i);
    else
      first_internal = std::min(first_internal, static_cast<int>(i));
  }
  plan.external_first = last_external < first_internal;
  return plan;
}

CostEstimate parse_cost_estimate(const IncludeGraph &graph,
                                 const ModuleAssignment &assignment,
                                 const std::map<std::string, int> &line_counts) {
  auto lines_of = [&](const std::string &path) {
    auto it = line_counts.find(path);
    if (it == line_counts.end())
      throw Error("line count missing for file: " + path);
    return it->second;
  };

  CostEstimate cost;
  for (const auto &[path, info] : graph.nodes) {
    if (info.kind != NodeKind::TranslationUnit)
      continue;
    cost.textual_lines += lines_of(path);
    cost.modular_lines += lines_of(path);
    for (const std::string &h : transitive_includes(graph, path))
      cost.textual_lines += lines_of(h);
  }
  const DuplicationReport report =
      duplication_report(graph, assignment, line_counts);
  cost.modular_lines += report.total_duplicated_lines;
  return cost;
}

std::string plan_to_json(const MigrationPlan &plan, const ModuleDepGraph &dep,
                         const DuplicationReport &report,
                         const CostEstimate &cost) {
  nlohmann::ordered_json j;
  j["order"] = plan.order;
  j["cycle_groups"] = plan.cycle_groups;
  j["externals"] =
      std::vector<std::string>(dep.externals.begin(), dep.externals.end());
  j["external_first"] = plan.external_first;
  j["module_edges"] = nlohmann::ordered_json::array();
  for (const auto &[edge, mult] : dep.edges) {
    nlohmann::ordered_json ej;
    ej["from"] = edge.first;
    ej["to"] = edge.second;
    ej["includes"] = mult;
    j["module_edges"].push_back(std::move(ej));
  }
  j["duplication_report"] = nlohmann::ordered_json::object();
  j["duplication_report"]["headers"] = nlohmann::ordered_json::array();
  for (const DuplicationRow &row : report.rows) {
    nlohmann::ordered_json rj;
    rj["path"] = row.path;
    rj["duplication_count"] = row.duplication_count;
    rj["lines"] = row.lines;
    rj["duplicated_lines"] = row.duplicated_lines;
    j["duplication_report"]["headers"].push_back(std::move(rj));
  }
  j["duplication_report"]["total_duplicated_lines"] =
      report.total_duplicated_lines;
  j["cost_estimate"] = {{"textual_lines", cost.textual_lines},
                        {"modular_lines", cost.modular_lines}};
  return j.dump(2) + "\n";
}

} // namespace modmig
