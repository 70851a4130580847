#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "napa/dynamics.hpp"
#include "napa/framework.hpp"

namespace napa {

/// Reachable state space with labelled edges. States are deduplicated by
/// value (visible set and quantity map); ids are BFS insertion order, so the
/// graph is identical across runs.
struct StateGraph {
  struct Edge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::vector<ArgIndex> union_set;
    std::vector<TripleIndex> lambda;
  };
  std::vector<State> states;   // states[0] is the initial state
  std::vector<Edge> edges;
  bool truncated = false;

  std::optional<std::uint32_t> find(const State& s) const;
};

/// Breadth-first closure from the initial state. Stops inserting new states at
/// max_states (flag set, never an error). lambda_cap bounds the persuasion-set
/// enumeration per union set; hitting it also marks the graph truncated.
StateGraph explore(const Framework& fw, std::size_t max_states,
                   std::size_t lambda_cap = 1u << 20);

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

struct QueryAtom {
  enum class Kind : std::uint8_t { visible, not_visible, qty_cmp };
  enum class Rel : std::uint8_t { eq, lt, le, gt, ge };
  Kind kind = Kind::visible;
  ArgIndex arg = 0;
  Rel rel = Rel::eq;
  Quantity value = 0;
};

/// Conjunction of atoms over one state.
struct Query {
  std::vector<QueryAtom> atoms;
};

struct QueryParse {
  std::optional<Query> query;
  std::string error;   // set when query is absent
};

/// Surface syntax: atoms joined by `&&`; an atom is `visible(a)`,
/// `!visible(a)` (also spelled `not-visible(a)`) or `qty(a) OP n` with OP in
/// {==, <, <=, >, >=}. Unknown arguments and qty() on a non-resource argument
/// are rejected here, before any search runs.
QueryParse parse_query(const Framework& fw, const std::string& text);

bool eval_query(const Query& q, const State& s);
std::string query_to_string(const Framework& fw, const Query& q);

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct TraceStep {
  std::vector<ArgIndex> union_set;
  std::vector<TripleIndex> lambda;
  State result;
};

/// Replayable run: state 0 is the initial state of the framework.
struct Trace {
  std::vector<TraceStep> steps;
};

struct ReachResult {
  enum class Kind : std::uint8_t { witness, not_found, inconclusive };
  Kind kind = Kind::not_found;
  Trace trace;            // witness only; shortest, canonical tie-breaking
  std::size_t explored = 0;
};

/// Shortest witness trace to a state satisfying q, NotFound after a full
/// exploration, or Inconclusive when truncation hit before a witness.
ReachResult check_reachable(const Framework& fw, const Query& q, std::size_t max_states,
                            std::size_t lambda_cap = 1u << 20);

/// Line-oriented text form: line 1 is the framework content hash; each step is
/// `union | lambda | visible | quantities` with canonical ordering throughout.
std::string trace_to_text(const Framework& fw, const Trace& t);

struct ReplayResult {
  bool verified = false;
  std::size_t failed_step = 0;   // 1-based; 0 = header
  std::string reason;
};

/// Re-executes a recorded trace: checks the hash line, union-set validity,
/// persuasion-set validity, and that each recorded state matches the result
/// of apply. Any mismatch reports the first failing step.
ReplayResult replay(const Framework& fw, const std::string& trace_text);

}  // namespace napa
