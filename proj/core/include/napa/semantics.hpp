#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "napa/framework.hpp"

namespace napa {

/// Plain finite attack graph, for the classical baseline semantics.
struct AttackGraph {
  std::uint32_t num_args = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> attacks;
};

/// Exact extension sets by subset enumeration:
///   complete  — admissible sets containing every argument they defend
///   preferred — set-theoretically maximal admissible sets
///   grounded  — the intersection of all complete sets (always a single set)
/// Results are canonically sorted. Throws std::length_error above 30 args.
std::vector<std::vector<std::uint32_t>> dung_extensions(const AttackGraph& af, Sem sem);

/// Grounded extension by least-fixpoint iteration; must agree with
/// dung_extensions(af, grounded) and is cross-checked by tests.
std::vector<std::uint32_t> grounded_fixpoint(const AttackGraph& af);

/// The acceptable sets of one agent in one state.
struct ExtensionSet {
  std::string agent;
  Sem sem = Sem::preferred;
  /// Canonically sorted; each extension is a subset of scope(agent) ∩ visible.
  /// Empty only in the degenerate case where no complete set exists; callers
  /// must treat that as "no acceptable stance", not as the empty stance.
  std::vector<std::vector<ArgIndex>> extensions;
};

/// State-wise semantics for one agent: candidate sets range over subsets of
/// scope(agent) ∩ visible, attackers range over all visible arguments of the
/// constraint-adjusted attack graph, and defence must come from the candidate
/// set itself. Throws on an unknown agent.
ExtensionSet agent_extensions(const Framework& fw, const State& s, const std::string& agent);

/// All unions of one extension chosen per agent. Empty iff some agent has an
/// empty ExtensionSet. Arguments outside every agent's scope never occur.
std::vector<std::vector<ArgIndex>> multi_agent_union_sets(const Framework& fw, const State& s);

}  // namespace napa
