#include <benchmark/benchmark.h>

#include <string>

#include "tutorgen/dsl.hpp"
#include "tutorgen/klm.hpp"
#include "tutorgen/lint.hpp"
#include "tutorgen/render.hpp"

using namespace tutorgen;

namespace {

// A document with `rows` step rows, each holding a label and two inputs split
// by a second label.
std::string document_source(int rows) {
  std::string text = "title[Benchmark tutor]\n";
  for (int i = 0; i < rows; ++i) {
    const auto n = std::to_string(i);
    text += "row { label[Step " + n + ":] input[a" + n + "] label[=] input[b" + n + "] }\n";
  }
  return text;
}

void BM_Parse(benchmark::State& state) {
  const auto source = document_source(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsl::parse_document(source));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * source.size()));
}
BENCHMARK(BM_Parse)->Range(8, 1024);

void BM_PrettyPrint(benchmark::State& state) {
  const auto layout = dsl::parse_document(document_source(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(dsl::pretty_print(layout));
}
BENCHMARK(BM_PrettyPrint)->Range(8, 1024);

void BM_Render(benchmark::State& state) {
  const auto layout = dsl::parse_document(document_source(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(html::render_document(layout));
}
BENCHMARK(BM_Render)->Range(8, 1024);

void BM_Lint(benchmark::State& state) {
  const auto layout = dsl::parse_document(document_source(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(lint::lint_document(layout));
}
BENCHMARK(BM_Lint)->Range(8, 1024);

void BM_KlmEstimate(benchmark::State& state) {
  klm::ActionTrace trace;
  const klm::Operator ops[] = {klm::Operator::K, klm::Operator::P, klm::Operator::B, klm::Operator::H,
                               klm::Operator::M};
  for (int i = 0; i < state.range(0); ++i) trace.actions.push_back({ops[i % 5], static_cast<std::uint32_t>(1 + i % 7), {}});
  for (auto _ : state) benchmark::DoNotOptimize(klm::estimate(trace));
}
BENCHMARK(BM_KlmEstimate)->Range(8, 4096);

}  // namespace

BENCHMARK_MAIN();
