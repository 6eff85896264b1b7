#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "modmig/scan.hpp"

namespace {

std::string synthetic_header(int lines) {
  std::mt19937 rng(9001);
  std::string text = "#ifndef SYNTH_H\n#define SYNTH_H\n";
  for (int i = 0; i < lines; ++i) {
    switch (rng() % 6) {
    case 0:
      text += "#include \"dir/file" + std::to_string(rng() % 64) + ".h\"\n";
      break;
    case 1:
      text += "#include <sys" + std::to_string(rng() % 16) + ".h>\n";
      break;
    case 2:
      text += "// commentary line " + std::to_string(i) + "\n";
      break;
    case 3:
      text += "#define MACRO_" + std::to_string(i) + " 1\n";
      break;
    default:
      text += "int symbol_" + std::to_string(i) + "; /* trailing */\n";
      break;
    }
  }
  text += "#endif\n";
  return text;
}

void BM_scan_source(benchmark::State &state) {
  const std::string text = synthetic_header(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(modmig::scan_source(text));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}

} // namespace

BENCHMARK(BM_scan_source)->Arg(128)->Arg(1024)->Arg(8192);
