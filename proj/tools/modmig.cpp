// modmig - C++ Modules migration toolkit driver.
//
// Subcommands: scan | check | genmap | overlay | plan. Exit status is part
// of the interface: 0 clean, 1 analysis findings (cycles, broken or
// incomplete headers, layering violations), 2 usage or I/O errors. CI gates
// can therefore distinguish findings from tool faults.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "modmig/error.hpp"
#include "modmig/include_graph.hpp"
#include "modmig/manifest.hpp"
#include "modmig/modulemap.hpp"
#include "modmig/overlay.hpp"
#include "modmig/planner.hpp"
#include "modmig/sanitizer.hpp"

namespace fs = std::filesystem;
using namespace modmig;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string manifest_path;
  std::string out_dir = "modmig-out";
  std::string format = "text";
  int jobs = 0; // 0 -> hardware concurrency
  bool no_cache = false;
  bool ignore_conditional_includes = false;

  int effective_jobs() const {
    if (jobs > 0)
      return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
  }
};

struct CheckOpts {
  std::string check_cmd;
  bool no_compile_checks = false;
  std::string missing_regex = default_missing_include_pattern();
};

void add_common(CLI::App *cmd, CommonOpts &opts, bool needs_manifest) {
  auto *m = cmd->add_option("-m,--manifest", opts.manifest_path,
                            "Manifest JSON file");
  if (needs_manifest)
    m->required();
  cmd->add_option("-o,--out", opts.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--format", opts.format, "Summary format on stdout")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_option("-j,--jobs", opts.jobs,
                  "Parallelism (default: logical CPU count)");
  cmd->add_flag("--no-cache", opts.no_cache,
                "Ignore cached intermediate files and recompute");
  cmd->add_flag("--ignore-conditional-includes",
                opts.ignore_conditional_includes,
                "Drop includes guarded by preprocessor conditionals");
}

void add_check_opts(CLI::App *cmd, CheckOpts &opts) {
  cmd->add_option("--check-cmd", opts.check_cmd,
                  "Standalone compile command template; must contain "
                  "{header}, may contain {out}")
      ->envname("MODMIG_CHECK_CMD");
  cmd->add_flag("--no-compile-checks", opts.no_compile_checks,
                "Skip per-header compile checks");
  cmd->add_option("--missing-include-regex", opts.missing_regex,
                  "Pattern extracting missing-header names from diagnostics");
}

std::string read_text_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error("cannot read file: " + p.generic_string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

void write_text_file(const fs::path &p, const std::string &content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
  if (!out)
    throw Error("cannot write file: " + p.generic_string());
}

// Stage pipeline with file-level caching under the output directory.
struct Pipeline {
  CommonOpts common;
  LibraryManifest manifest;

  fs::path out() const { return fs::path(common.out_dir); }

  static Pipeline load(const CommonOpts &common,
                       const std::vector<std::string> &only_libs) {
    Pipeline p;
    p.common = common;
    p.manifest = load_manifest(common.manifest_path);
    if (!only_libs.empty()) {
      std::vector<LibrarySpec> kept;
      for (const LibrarySpec &lib : p.manifest.libraries)
        for (const std::string &want : only_libs)
          if (lib.name == want) {
            kept.push_back(lib);
            break;
          }
      if (kept.size() != only_libs.size())
        throw Error("--only-libs names a library missing from the manifest");
      p.manifest.libraries = std::move(kept);
    }
    fs::create_directories(p.out());
    return p;
  }

  IncludeGraph graph() const {
    const fs::path cache = out() / "graph.json";
    if (!common.no_cache && fs::is_regular_file(cache))
      return graph_from_json(read_text_file(cache));
    BuildOptions options;
    options.jobs = common.effective_jobs();
    options.ignore_conditional_includes = common.ignore_conditional_includes;
    IncludeGraph g = build_graph(manifest, options);
    write_text_file(cache, graph_to_json(g));
    return g;
  }

  std::vector<HeaderRecord> records(const IncludeGraph &g,
                                    const CheckOpts &check) const {
    const fs::path cache = out() / "headers.json";
    if (!common.no_cache && fs::is_regular_file(cache))
      return records_from_json(read_text_file(cache));
    std::map<std::string, CompileCheckResult> compile_results;
    if (!check.no_compile_checks && !check.check_cmd.empty()) {
      const fs::path check_dir = out() / "checks";
      fs::create_directories(check_dir);
      const auto plan =
          standalone_check_plan(all_interface_headers(manifest),
                                check.check_cmd, check_dir.generic_string());
      const auto results = run_standalone_checks(
          plan, shell_executor(), common.effective_jobs(),
          check.missing_regex);
      for (const CompileCheckResult &r : results)
        compile_results[r.header] = r;
    }
    auto recs = classify_headers(g, manifest, collect_records(g, manifest),
                                 find_cycles(g), compile_results,
                                 manifest.overrides);
    write_text_file(cache, records_to_json(recs));
    return recs;
  }
};

std::map<Classification, int>
classification_counts(const std::vector<HeaderRecord> &records) {
  std::map<Classification, int> counts;
  for (const HeaderRecord &r : records)
    ++counts[r.classification];
  return counts;
}

int cmd_scan(const CommonOpts &common,
             const std::vector<std::string> &only_libs) {
  const Pipeline p = Pipeline::load(common, only_libs);
  const IncludeGraph g = p.graph();
  if (common.format == "json") {
    std::cout << graph_to_json(g);
  } else {
    std::printf("graph: %zu nodes, %zu edges, %zu unresolved includes\n",
                g.nodes.size(), g.edges.size(), g.unresolved.size());
    for (const std::string &d : g.diagnostics)
      std::printf("note: %s\n", d.c_str());
    std::printf("wrote %s\n", (p.out() / "graph.json").generic_string().c_str());
  }
  return kExitClean;
}

int cmd_check(const CommonOpts &common, const CheckOpts &check,
              const std::vector<std::string> &only_libs) {
  if (check.check_cmd.empty() && !check.no_compile_checks)
    throw Error("check requires --check-cmd (or MODMIG_CHECK_CMD) or an "
                "explicit --no-compile-checks");
  const Pipeline p = Pipeline::load(common, only_libs);
  const IncludeGraph g = p.graph();
  const auto records = p.records(g, check);

  bool findings = false;
  for (const HeaderRecord &r : records)
    if (r.classification != Classification::Standalone &&
        r.classification != Classification::Macro)
      findings = true;

  if (common.format == "json") {
    std::cout << records_to_json(records);
  } else {
    const auto counts = classification_counts(records);
    std::printf("%-18s %d\n", "standalone",
                counts.count(Classification::Standalone)
                    ? counts.at(Classification::Standalone)
                    : 0);
    for (const auto &[cls, count] : counts) {
      if (cls == Classification::Standalone)
        continue;
      std::printf("%-18s %d\n", to_string(cls).c_str(), count);
    }
    for (const HeaderRecord &r : records) {
      if (r.classification == Classification::Standalone)
        continue;
      std::printf("%-18s %s\n", to_string(r.classification).c_str(),
                  r.path.c_str());
      for (const std::string &e : r.evidence)
        std::printf("                   - %s\n", e.c_str());
    }
    std::printf("wrote %s\n",
                (p.out() / "headers.json").generic_string().c_str());
  }
  return findings ? kExitFindings : kExitClean;
}

int cmd_genmap(const CommonOpts &common, const CheckOpts &check,
               const std::string &suffix,
               const std::vector<std::string> &only_libs) {
  const Pipeline p = Pipeline::load(common, only_libs);
  const IncludeGraph g = p.graph();
  const auto records = p.records(g, check);
  GenerateOptions options;
  options.suffix = suffix;
  ModulemapResult result;
  try {
    result = generate_modulemap(p.manifest, records, options);
  } catch (const LayeringViolation &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFindings;
  }
  const std::string text = render_modulemap(result.doc);
  write_text_file(p.out() / "module.modulemap", text);
  write_text_file(p.out() / "omitted.json", omitted_to_json(result.omitted));
  if (common.format == "json") {
    std::cout << omitted_to_json(result.omitted);
  } else {
    std::printf("wrote %s (%zu modules, %zu omitted headers)\n",
                (p.out() / "module.modulemap").generic_string().c_str(),
                result.doc.modules.size(), result.omitted.size());
    for (const OmittedHeader &o : result.omitted)
      std::printf("omitted: %s (%s)\n", o.path.c_str(), o.reason.c_str());
  }
  return kExitClean;
}

int cmd_overlay(const CommonOpts &common,
                const std::vector<std::string> &mounts,
                const std::vector<std::string> &relocations) {
  std::vector<MountSpec> specs;
  for (const std::string &m : mounts) {
    const size_t eq = m.find('=');
    if (eq == std::string::npos)
      throw Error("--mount expects VIRTUAL=PHYSICAL, got: " + m);
    const fs::path virt(m.substr(0, eq));
    MountSpec spec;
    spec.virtual_dir = virt.parent_path().generic_string();
    spec.virtual_name = virt.filename().generic_string();
    spec.physical_path = m.substr(eq + 1);
    specs.push_back(std::move(spec));
  }
  OverlayDocument doc = build_overlay(specs);
  for (const std::string &r : relocations) {
    const size_t eq = r.find('=');
    if (eq == std::string::npos)
      throw Error("--relocate expects OLD=NEW, got: " + r);
    doc = relocate(doc, r.substr(0, eq), r.substr(eq + 1)).doc;
  }
  const std::string text = render_overlay(doc);
  fs::create_directories(common.out_dir);
  write_text_file(fs::path(common.out_dir) / "overlay.json", text);
  if (common.format == "json")
    std::cout << text;
  else
    std::printf("wrote %s (%zu roots)\n",
                (fs::path(common.out_dir) / "overlay.json")
                    .generic_string()
                    .c_str(),
                doc.roots.size());
  return kExitClean;
}

int cmd_plan(const CommonOpts &common, const CheckOpts &check,
             const std::string &assignment_file, const std::string &suffix,
             const std::vector<std::string> &only_libs) {
  const Pipeline p = Pipeline::load(common, only_libs);
  const IncludeGraph g = p.graph();

  ModulemapDocument doc;
  const fs::path cached_map = p.out() / "module.modulemap";
  if (!assignment_file.empty()) {
    doc = parse_modulemap(read_text_file(assignment_file));
  } else if (!common.no_cache && fs::is_regular_file(cached_map)) {
    doc = parse_modulemap(read_text_file(cached_map));
  } else {
    const auto records = p.records(g, check);
    GenerateOptions options;
    options.suffix = suffix;
    const ModulemapResult result = generate_modulemap(p.manifest, records, options);
    write_text_file(cached_map, render_modulemap(result.doc));
    write_text_file(p.out() / "omitted.json", omitted_to_json(result.omitted));
    doc = result.doc;
  }

  const ModuleAssignment base =
      assignment_from_modulemap(doc, p.manifest.root_dir);
  std::map<std::string, int> line_counts;
  for (const auto &[path, info] : g.nodes)
    line_counts[path] = info.lines;

  const auto externals = detect_external_candidates(g, p.manifest, base);
  const ModuleAssignment extended = extend_with_externals(base, externals);
  const ModuleDepGraph dep = module_dependency_graph(g, extended);
  const MigrationPlan plan = bottom_up_order(dep);
  const DuplicationReport report = duplication_report(g, base, line_counts);
  const CostEstimate cost = parse_cost_estimate(g, base, line_counts);

  const std::string json = plan_to_json(plan, dep, report, cost);
  write_text_file(p.out() / "plan.json", json);

  if (common.format == "json") {
    std::cout << json;
  } else {
    std::printf("migration order (dependencies first):\n");
    for (size_t i = 0; i < plan.order.size(); ++i)
      std::printf("  %2zu. %s\n", i + 1, plan.order[i].c_str());
    for (const auto &group : plan.cycle_groups) {
      std::printf("cycle group (migrate together):");
      for (const std::string &m : group)
        std::printf(" %s", m.c_str());
      std::printf("\n");
    }
    std::printf("duplication offenders (count >= 2):\n");
    std::printf("  %-8s %-8s %s\n", "copies", "lines", "header");
    bool any = false;
    for (const DuplicationRow &row : report.rows) {
      if (row.duplication_count < 2)
        continue;
      any = true;
      std::printf("  %-8d %-8lld %s\n", row.duplication_count,
                  row.duplicated_lines, row.path.c_str());
    }
    if (!any)
      std::printf("  (none)\n");
    std::printf("parse cost: textual %lld lines, modular %lld lines\n",
                cost.textual_lines, cost.modular_lines);
    std::printf("wrote %s\n", (p.out() / "plan.json").generic_string().c_str());
  }
  return kExitClean;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"C++ Modules migration toolkit: include-graph analysis, "
               "header sanitization, modulemap and VFS overlay generation, "
               "bottom-up migration planning"};
  app.require_subcommand(1);

  CommonOpts scan_common, check_common, genmap_common, overlay_common,
      plan_common;
  CheckOpts check_opts, genmap_check, plan_check;
  std::vector<std::string> scan_only, check_only, genmap_only, plan_only;
  std::string genmap_suffix = "_xr", plan_suffix = "_xr";
  std::string plan_assignment;
  std::vector<std::string> mounts, relocations;

  CLI::App *scan = app.add_subcommand("scan", "Build and export the include graph");
  add_common(scan, scan_common, true);
  scan->add_option("--only-libs", scan_only, "Restrict to named libraries")
      ->delimiter(',');

  CLI::App *check = app.add_subcommand(
      "check", "Classify headers (standalone/incomplete/broken/cyclic/"
               "macro/token-generating)");
  add_common(check, check_common, true);
  add_check_opts(check, check_opts);
  check->add_option("--only-libs", check_only, "Restrict to named libraries")
      ->delimiter(',');

  CLI::App *genmap =
      app.add_subcommand("genmap", "Generate module.modulemap");
  add_common(genmap, genmap_common, true);
  add_check_opts(genmap, genmap_check);
  genmap->add_option("--suffix", genmap_suffix, "Module name suffix")
      ->capture_default_str();
  genmap->add_option("--only-libs", genmap_only, "Restrict to named libraries")
      ->delimiter(',');

  CLI::App *overlay = app.add_subcommand(
      "overlay", "Build a virtual filesystem overlay for modulemap mounts");
  add_common(overlay, overlay_common, false);
  overlay
      ->add_option("--mount", mounts,
                   "VIRTUAL=PHYSICAL modulemap mount (repeatable)")
      ->required();
  overlay->add_option("--relocate", relocations,
                      "OLD=NEW prefix rewrite applied before writing");

  CLI::App *plan = app.add_subcommand(
      "plan", "Produce a bottom-up migration order with duplication report");
  add_common(plan, plan_common, true);
  add_check_opts(plan, plan_check);
  plan->add_option("--assignment", plan_assignment,
                   "Modulemap file providing the header-to-module mapping "
                   "(default: cached genmap output)");
  plan->add_option("--suffix", plan_suffix, "Module name suffix")
      ->capture_default_str();
  plan->add_option("--only-libs", plan_only, "Restrict to named libraries")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitClean : kExitUsage;
  }

  try {
    if (scan->parsed())
      return cmd_scan(scan_common, scan_only);
    if (check->parsed())
      return cmd_check(check_common, check_opts, check_only);
    if (genmap->parsed())
      return cmd_genmap(genmap_common, genmap_check, genmap_suffix,
                        genmap_only);
    if (overlay->parsed())
      return cmd_overlay(overlay_common, mounts, relocations);
    if (plan->parsed())
      return cmd_plan(plan_common, plan_check, plan_assignment, plan_suffix,
                      plan_only);
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
