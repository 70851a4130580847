#include <doctest.h>

#include <random>
#include <tuple>

#include "napa/dsl.hpp"
#include "napa/dynamics.hpp"
#include "napa/explorer.hpp"
#include "napa/semantics.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace napa;

namespace {

// Full per-state agreement between the engine and the symbolic brute force.
void check_state(const FrameworkDef& def, const Framework& fw, const State& s) {
  const oracle::SymState st = oracle::to_sym(fw, s);

  for (const auto& agent : fw.agents()) {
    std::set<oracle::ArgSet> engine;
    for (const auto& e : agent_extensions(fw, s, agent.id).extensions)
      engine.insert(oracle::to_sym_args(fw, e));
    CHECK(engine == oracle::extensions(def, st, agent.id));
  }

  std::set<oracle::ArgSet> engine_unions;
  const auto unions = multi_agent_union_sets(fw, s);
  for (const auto& u : unions) engine_unions.insert(oracle::to_sym_args(fw, u));
  CHECK(engine_unions == oracle::union_sets(def, st));

  std::set<oracle::SymEdge> engine_edges;
  for (const auto& u : unions) {
    CHECK(oracle::to_sym_lambda(fw, lambda_base(fw, s, u)) ==
          oracle::lambda_base(def, st, oracle::to_sym_args(fw, u)));
    for (const auto& lam : enumerate_persuasion_sets(fw, s, u, 1u << 20).sets) {
      oracle::TripleSet sym_lam = oracle::to_sym_lambda(fw, lam);
      CHECK(oracle::valid_lambda(def, st, sym_lam));
    }
  }
  for (const auto& e : successors(fw, s, 1u << 20).edges)
    engine_edges.insert({oracle::to_sym_args(fw, e.union_set),
                         oracle::to_sym_lambda(fw, e.lambda), oracle::to_sym(fw, e.to)});
  CHECK(engine_edges == oracle::successors(def, st));
}

}  // namespace

TEST_CASE("engine agrees with brute force on random scenarios") {
  std::mt19937 rng(987654);
  for (int round = 0; round < 80; ++round) {
    FrameworkDef def = gen::random_def(rng);
    Framework fw = Framework::compile(def);
    State s = initial_state(fw);
    CAPTURE(round);
    check_state(def, fw, s);

    // Also one step deeper, if there is anywhere to go.
    SuccessorList next = successors(fw, s, 256);
    if (!next.edges.empty())
      check_state(def, fw, next.edges[round % next.edges.size()].to);
  }
}

TEST_CASE("engine agrees with brute force across whole reachable graphs") {
  std::mt19937 rng(246810);
  int states_checked = 0;
  for (int round = 0; round < 25; ++round) {
    gen::GenOptions opt;
    opt.max_args = 7;
    opt.max_persuasions = 6;
    FrameworkDef def = gen::random_def(rng, opt);
    Framework fw = Framework::compile(def);
    StateGraph g = explore(fw, 30, 1u << 12);
    if (g.truncated) continue;
    CAPTURE(round);
    for (const auto& s : g.states) {
      check_state(def, fw, s);
      ++states_checked;
    }
  }
  CHECK(states_checked > 25);
}

TEST_CASE("a framework without agents still has the empty jury") {
  // With no agents, the only union set is empty and nothing is blocked.
  ParseResult r = parse("arg x\narg y\ninit { x }\ninduce x => y\n");
  REQUIRE(r.ok());
  const Framework& fw = *r.framework;
  State s = initial_state(fw);
  auto unions = multi_agent_union_sets(fw, s);
  REQUIRE(unions.size() == 1);
  CHECK(unions[0].empty());
  CHECK(lambda_base(fw, s, {}) == possible_persuasions(fw, s, {}));
  SuccessorList next = successors(fw, s, 100);
  REQUIRE(next.edges.size() == 1);
  CHECK(next.edges[0].to.is_visible(fw.arg("y")));
}
