#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "napa/dsl.hpp"
#include "napa/dynamics.hpp"
#include "napa/explorer.hpp"
#include "napa/semantics.hpp"

namespace {

std::string scenario_text() {
  std::ifstream in(std::string(NAPA_SCENARIO_DIR) + "/console_market.napa",
                   std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const napa::Framework& market() {
  static const napa::Framework fw = *napa::parse(scenario_text()).framework;
  return fw;
}

void ParseScenario(benchmark::State& state) {
  const std::string text = scenario_text();
  for (auto _ : state) {
    auto r = napa::parse(text);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(ParseScenario);

void AgentSemantics(benchmark::State& state) {
  const napa::Framework& fw = market();
  const napa::State s = napa::initial_state(fw);
  for (auto _ : state)
    for (const auto& agent : fw.agents()) {
      auto ext = napa::agent_extensions(fw, s, agent.id);
      benchmark::DoNotOptimize(ext);
    }
}
BENCHMARK(AgentSemantics);

void Successors(benchmark::State& state) {
  const napa::Framework& fw = market();
  const napa::State s = napa::initial_state(fw);
  for (auto _ : state) {
    auto next = napa::successors(fw, s, 1u << 20);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(Successors);

void ExploreAll(benchmark::State& state) {
  const napa::Framework& fw = market();
  for (auto _ : state) {
    auto g = napa::explore(fw, 100000);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(ExploreAll);

}  // namespace

BENCHMARK_MAIN();
