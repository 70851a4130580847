// Acceptance suite: reproduces the bundled console-market scenario end to end
// and runs the randomized equivalence and robustness gates. One line per
// criterion; exits nonzero if any criterion fails.

#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "napa/constraints.hpp"
#include "napa/dsl.hpp"
#include "napa/dynamics.hpp"
#include "napa/explorer.hpp"
#include "napa/semantics.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace napa;

namespace {

struct Harness {
  int failures = 0;

  void run(int id, const std::string& title, const std::function<void()>& body) {
    std::string detail;
    bool pass = true;
    try {
      body();
    } catch (const std::exception& e) {
      pass = false;
      detail = e.what();
    }
    std::printf("[%s] C%-2d %s%s%s\n", pass ? "PASS" : "FAIL", id, title.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
  }
};

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

std::vector<ArgIndex> args_of(const Framework& fw, std::initializer_list<const char*> ids) {
  std::vector<ArgIndex> out;
  for (const char* id : ids) out.push_back(fw.arg(id));
  std::sort(out.begin(), out.end());
  return out;
}

oracle::TripleSet six_moves() {
  return {{"a13", std::string("a4"), "a15"}, {"a6", std::string("a16"), "a5"},
          {"a13", std::string("a9"), "a15"}, {"a10", std::string("a16"), "a11"},
          {"a2", std::string("a9"), "a4"},   {"a10", std::string("a5"), "a11"}};
}

oracle::TripleSet shop_sale() {   // pay the shop 300 ~ receive the console
  return {{"a13", std::string("a9"), "a15"}, {"a10", std::string("a16"), "a11"}};
}
oracle::TripleSet reseller_restock() {   // reseller pays the shop ~ receives
  return {{"a13", std::string("a4"), "a15"}, {"a6", std::string("a16"), "a5"}};
}
oracle::TripleSet reseller_sale() {   // pay the reseller 400 ~ receive
  return {{"a2", std::string("a9"), "a4"}, {"a10", std::string("a5"), "a11"}};
}

std::vector<TripleIndex> resolve(const Framework& fw, const oracle::TripleSet& sym) {
  std::vector<TripleIndex> out;
  for (const auto& t : sym) out.push_back(fw.triple_index(t.source, t.middle, t.target));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main() {
  Harness h;

  h.run(1, "per-agent semantics at the initial state match exactly", [] {
    Framework fw = fixtures::market();
    State s = initial_state(fw);
    auto expect = [&](const char* agent, std::initializer_list<const char*> ids) {
      auto ext = agent_extensions(fw, s, agent);
      require(ext.extensions.size() == 1,
              std::string(agent) + " should have exactly one extension");
      require(ext.extensions[0] == args_of(fw, ids), std::string(agent) + " set differs");
    };
    expect("e1", {"a12", "a13", "a15", "a16"});
    expect("e2", {"a8", "a9", "a10"});
    expect("e3", {"a1", "a2", "a4", "a5", "a6"});
  });

  h.run(2, "possible persuasions equal the six-move set for every stance", [] {
    Framework fw = fixtures::market();
    State s = initial_state(fw);
    for (const char* agent : {"e1", "e2", "e3"}) {
      auto ext = agent_extensions(fw, s, agent).extensions;
      require(ext.size() == 1, "unique extension expected");
      require(oracle::to_sym_lambda(fw, possible_persuasions(fw, s, ext[0])) == six_moves(),
              std::string("possible set for ") + agent + " differs");
    }
    auto unions = multi_agent_union_sets(fw, s);
    require(unions.size() == 1, "one union set expected");
    require(oracle::to_sym_lambda(fw, lambda_base(fw, s, unions[0])) == six_moves(),
            "joint base differs");
  });

  h.run(3, "the multi-agent union set is unique and is the scope-wise union", [] {
    Framework fw = fixtures::market();
    auto unions = multi_agent_union_sets(fw, initial_state(fw));
    require(unions.size() == 1, "expected exactly one union set");
    require(unions[0] == args_of(fw, {"a12", "a13", "a15", "a16", "a8", "a9", "a10", "a1",
                                      "a2", "a4", "a5", "a6"}),
            "union set differs");
  });

  h.run(4, "selling the one console twice fails resource-safety on a16", [] {
    Framework fw = fixtures::market();
    State s = initial_state(fw);
    auto base = lambda_base(fw, s, multi_agent_union_sets(fw, s)[0]);
    oracle::TripleSet both = shop_sale();
    for (const auto& t : reseller_restock()) both.insert(t);
    auto v = is_valid_persuasion_set(fw, s, resolve(fw, both), base);
    require(!v.valid(), "the double sale must be invalid");
    require(v.code == SetValidity::Code::resource_safety, "expected a resource-safety verdict");
    require(v.offender == "a16", "diagnostic must name a16, got " + v.offender);
  });

  h.run(5, "applying the first sale yields the exact successor state", [] {
    Framework fw = fixtures::market();
    State s1 = apply(fw, initial_state(fw), resolve(fw, shop_sale()));
    auto q = [&](const char* id) { return quantity_of(s1.quantities, fw.arg(id)).value(); };
    require(q("a9") == 350 && q("a11") == 1 && q("a15") == 600 && q("a16") == 0,
            "quantities differ");
    require(q("a4") == 300 && q("a5") == 1, "untouched quantities must carry over");
    require(!s1.is_visible(fw.arg("a16")), "a16 must leave the state");
    require(s1.is_visible(fw.arg("a11")), "a11 must enter the state");
    require(s1.visible == args_of(fw, {"a1", "a2", "a4", "a5", "a6", "a8", "a9", "a10",
                                       "a11", "a12", "a13", "a15"}),
            "visible set differs");
  });

  h.run(6, "exactly four simultaneous persuasion sets, confirmed by brute force", [] {
    Framework fw = fixtures::market();
    FrameworkDef def = fixtures::market_def();
    State s = initial_state(fw);
    auto st = oracle::sym_initial(def);

    // Independent brute force over all 63 nonempty subsets of the base.
    auto sym_unions = oracle::union_sets(def, st);
    require(sym_unions.size() == 1, "expected one union set");
    auto base_set = oracle::lambda_base(def, st, *sym_unions.begin());
    std::vector<oracle::SymTriple> base(base_set.begin(), base_set.end());
    require(base.size() == 6, "expected a six-element base");
    std::set<oracle::TripleSet> brute;
    for (unsigned mask = 1; mask < 64; ++mask) {
      oracle::TripleSet lam;
      for (unsigned b = 0; b < 6; ++b)
        if (mask & (1u << b)) lam.insert(base[b]);
      if (oracle::valid_lambda(def, st, lam)) brute.insert(lam);
    }

    oracle::TripleSet joint = reseller_restock();
    for (const auto& t : reseller_sale()) joint.insert(t);
    std::set<oracle::TripleSet> expected{shop_sale(), reseller_restock(), reseller_sale(),
                                         joint};
    require(brute == expected, "brute force disagrees with the expected four sets");

    auto list = enumerate_persuasion_sets(fw, s, multi_agent_union_sets(fw, s)[0], 1000);
    require(!list.truncated, "enumeration must complete");
    std::set<oracle::TripleSet> engine;
    for (const auto& lam : list.sets) engine.insert(oracle::to_sym_lambda(fw, lam));
    require(engine == expected, "engine enumeration disagrees");
  });

  h.run(7, "strict guard blocks the discount; relaxed variant replays the haggle", [] {
    Framework strict = fixtures::market();
    State s1 = apply(strict, initial_state(strict), resolve(strict, shop_sale()));
    TripleIndex induce = strict.triple_index("a8", std::nullopt, "a7");
    require(!sat(strict, strict.persuasion_when(induce), s1.quantities),
            "the strict induce guard must be unsatisfied after the first sale");
    auto adj = adjusted_persuasions(strict, s1);
    require(!std::binary_search(adj.begin(), adj.end(), induce),
            "the strict variant must not offer the discount request");

    Framework relaxed = fixtures::market_relaxed();
    State r1 = apply(relaxed, initial_state(relaxed), resolve(relaxed, shop_sale()));
    TripleIndex induce_r = relaxed.triple_index("a8", std::nullopt, "a7");
    require(sat(relaxed, relaxed.persuasion_when(induce_r), r1.quantities),
            "the relaxed induce guard must be satisfied after the first sale");

    // Step one of the haggle: the request appears, nothing else changes.
    State r2 = apply(relaxed, r1, {induce_r});
    auto grown = r1.visible;
    grown.push_back(relaxed.arg("a7"));
    std::sort(grown.begin(), grown.end());
    require(r2.visible == grown && r2.quantities == r1.quantities,
            "induce must only reveal a7");
    // It is also a legal transition on its own.
    bool induce_edge = false;
    for (const auto& e : successors(relaxed, r1, 1000).edges)
      if (e.lambda == std::vector<TripleIndex>{induce_r} && e.to == r2) induce_edge = true;
    require(induce_edge, "the induce step must be a legal transition");

    // Step two: the reseller's offer is converted to the discounted one.
    TripleIndex convert = relaxed.triple_index("a7", std::string("a2"), "a3");
    bool convert_edge = false;
    for (const auto& e : successors(relaxed, r2, 1000).edges)
      if (e.lambda == std::vector<TripleIndex>{convert}) {
        convert_edge = true;
        auto swapped = r2.visible;
        std::erase(swapped, relaxed.arg("a2"));
        swapped.push_back(relaxed.arg("a3"));
        std::sort(swapped.begin(), swapped.end());
        require(e.to.visible == swapped, "convert must swap a2 for a3");
        require(e.to.quantities == r2.quantities, "convert must not move quantities");
      }
    require(convert_edge, "the convert step must be a legal transition");

    // And the whole run is reachable from the initial state.
    QueryParse q = parse_query(relaxed, "visible(a3)");
    ReachResult witness = check_reachable(relaxed, *q.query, 100000);
    require(witness.kind == ReachResult::Kind::witness, "visible(a3) must be reachable");
    require(witness.trace.steps.size() == 3, "shortest haggle is three steps");

    QueryParse qs = parse_query(strict, "visible(a3)");
    require(check_reachable(strict, *qs.query, 100000).kind == ReachResult::Kind::not_found,
            "visible(a3) must be unreachable in the strict variant");
  });

  h.run(8, "conservation holds across the whole reachable space", [] {
    for (bool relaxed : {false, true}) {
      Framework fw = relaxed ? fixtures::market_relaxed() : fixtures::market();
      StateGraph g = explore(fw, 100000);
      require(!g.truncated, "exploration must terminate");
      auto money = args_of(fw, {"a4", "a9", "a15"});
      auto consoles = args_of(fw, {"a5", "a11", "a16"});
      for (const auto& s : g.states) {
        Quantity m = 0, c = 0;
        for (ArgIndex a : money) m += quantity_of(s.quantities, a).value();
        for (ArgIndex a : consoles) c += quantity_of(s.quantities, a).value();
        require(m == 1250, "money component must sum to 1250");
        require(c == 2, "console component must sum to 2");
        for (ArgIndex a : s.visible)
          if (fw.is_resource(a))
            require(quantity_of(s.quantities, a).value() > 0,
                    "a visible resource must have a positive quantity");
      }
    }
  });

  h.run(9, "engine vs brute force on 500 random scenarios: zero mismatches", [] {
    std::mt19937 rng(424242);
    for (int round = 0; round < 500; ++round) {
      FrameworkDef def = gen::random_def(rng);
      Framework fw = Framework::compile(def);
      State s = initial_state(fw);
      oracle::SymState st = oracle::to_sym(fw, s);
      const std::string tag = " (round " + std::to_string(round) + ")";

      for (const auto& agent : fw.agents()) {
        std::set<oracle::ArgSet> engine;
        for (const auto& e : agent_extensions(fw, s, agent.id).extensions)
          engine.insert(oracle::to_sym_args(fw, e));
        require(engine == oracle::extensions(def, st, agent.id), "extensions differ" + tag);
      }

      std::set<oracle::ArgSet> engine_unions;
      auto unions = multi_agent_union_sets(fw, s);
      for (const auto& u : unions) engine_unions.insert(oracle::to_sym_args(fw, u));
      require(engine_unions == oracle::union_sets(def, st), "union sets differ" + tag);

      std::set<oracle::SymEdge> engine_edges;
      for (const auto& u : unions) {
        require(oracle::to_sym_lambda(fw, lambda_base(fw, s, u)) ==
                    oracle::lambda_base(def, st, oracle::to_sym_args(fw, u)),
                "bases differ" + tag);
        for (const auto& lam : enumerate_persuasion_sets(fw, s, u, 1u << 20).sets)
          require(oracle::valid_lambda(def, st, oracle::to_sym_lambda(fw, lam)),
                  "engine accepted a set brute force rejects" + tag);
      }
      for (const auto& e : successors(fw, s, 1u << 20).edges)
        engine_edges.insert({oracle::to_sym_args(fw, e.union_set),
                             oracle::to_sym_lambda(fw, e.lambda), oracle::to_sym(fw, e.to)});
      require(engine_edges == oracle::successors(def, st), "successors differ" + tag);
    }
  });

  h.run(10, "quantity-free fragment matches the direct rewriting rule (200 runs)", [] {
    std::mt19937 rng(133713);
    for (int round = 0; round < 200; ++round) {
      gen::GenOptions opt;
      opt.max_args = 8;
      opt.with_quantities = false;
      opt.with_constraints = false;
      opt.with_handshakes = false;
      opt.single_agent_full_scope = true;
      FrameworkDef def = gen::random_def(rng, opt);
      Framework fw = Framework::compile(def);
      State s = initial_state(fw);

      std::set<std::tuple<oracle::ArgSet, oracle::TripleSet, oracle::ArgSet>> engine;
      for (const auto& e : successors(fw, s, 1u << 20).edges)
        engine.insert({oracle::to_sym_args(fw, e.union_set),
                       oracle::to_sym_lambda(fw, e.lambda),
                       oracle::to_sym_args(fw, e.to.visible)});

      std::set<std::tuple<oracle::ArgSet, oracle::TripleSet, oracle::ArgSet>> direct;
      auto st = oracle::sym_initial(def);
      for (const auto& ext : oracle::extensions(def, st, "e0"))
        for (const auto& [lam, target] : oracle::plain_apa_transitions(def, st.visible, ext))
          direct.insert({ext, lam, target});

      require(engine == direct, "edge sets differ (round " + std::to_string(round) + ")");
    }
  });

  h.run(11, "round trip on 500 scenarios; parser survives 100000 fuzz inputs", [] {
    {
      Framework fw = fixtures::market();
      ParseResult r = parse(serialize(fw));
      require(r.ok() && *r.framework == fw, "bundled scenario must round trip");
    }
    std::mt19937 rng(777);
    gen::GenOptions opt;
    opt.with_labels = true;
    for (int round = 0; round < 500; ++round) {
      Framework fw = Framework::compile(gen::random_def(rng, opt));
      ParseResult r = parse(serialize(fw));
      require(r.ok(), "generated scenario must parse (round " + std::to_string(round) + ")");
      require(*r.framework == fw, "round trip differs (round " + std::to_string(round) + ")");
    }

    const std::string seed_text = fixtures::read_scenario("console_market.napa");
    const char alphabet[] = "ax19 =$<>(){}[]~:,#\"\\\n\t->=>eps when amount \xff\xc0\x01";
    for (int round = 0; round < 100000; ++round) {
      std::string input;
      if (round % 4 == 0) {
        std::size_t a = rng() % seed_text.size();
        std::size_t b = a + rng() % std::min<std::size_t>(120, seed_text.size() - a);
        input = seed_text.substr(a, b - a);
        for (int k = 0; k < 6 && !input.empty(); ++k)
          input[rng() % input.size()] = alphabet[rng() % (sizeof(alphabet) - 1)];
      } else {
        std::size_t len = rng() % 120;
        for (std::size_t k = 0; k < len; ++k)
          input += alphabet[rng() % (sizeof(alphabet) - 1)];
      }
      parse(input);   // must not crash, hang or corrupt state
    }
  });

  if (h.failures == 0) {
    std::printf("acceptance: all 11 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", h.failures);
  return 1;
}
