#pragma once

#include <string>
#include <vector>

#include "napa/framework.hpp"

namespace napa {

/// Attacks active in a state: both endpoints visible and the guard satisfied.
std::vector<std::pair<ArgIndex, ArgIndex>> adjusted_attacks(const Framework& fw,
                                                            const State& s);

/// Persuasions active in a state, as indices into fw.persuasions():
/// inducements need a visible source, conversions a visible source and middle,
/// and both need their guard satisfied.
std::vector<TripleIndex> adjusted_persuasions(const Framework& fw, const State& s);

/// Members of adjusted_persuasions whose source is not attacked (per
/// adjusted_attacks) by any member of `ax`.
std::vector<TripleIndex> possible_persuasions(const Framework& fw, const State& s,
                                              const std::vector<ArgIndex>& ax);

/// Intersection over all agents of possible_persuasions w.r.t. ax ∩ scope(e).
/// Throws std::invalid_argument when ax is not a multi-agent union set in s.
std::vector<TripleIndex> lambda_base(const Framework& fw, const State& s,
                                     const std::vector<ArgIndex>& ax);

/// Verdict on a candidate simultaneous persuasion set.
struct SetValidity {
  enum class Code : std::uint8_t { ok, empty, not_in_base, handshake, resource_safety };
  Code code = Code::ok;
  std::string offender;   // triple or argument in display form
  std::string detail;

  bool valid() const { return code == Code::ok; }
};

/// Checks (a) membership in `base`, (b) handshake-compatibility: every member
/// with a nonempty handshake set has exactly one partner in the set, and
/// (c) resource-safety: no resource quantity would go below zero under the net
/// inc/dec effect, amounts evaluated against the pre-transition quantities.
/// An undefined amount fails resource-safety (fail-closed).
SetValidity is_valid_persuasion_set(const Framework& fw, const State& s,
                                    const std::vector<TripleIndex>& lambda,
                                    const std::vector<TripleIndex>& base);

struct PersuasionSetList {
  std::vector<std::vector<TripleIndex>> sets;   // canonical (lexicographic) order
  bool truncated = false;
};

/// All nonempty valid subsets of lambda_base(fw, s, ax), stopping after `cap`
/// results with the truncation flag set.
PersuasionSetList enumerate_persuasion_sets(const Framework& fw, const State& s,
                                            const std::vector<ArgIndex>& ax,
                                            std::size_t cap);

/// Applies a simultaneous persuasion set. Quantities are updated first
/// (amounts snapshotted against s.quantities); then conversion middles whose
/// new quantity is zero or undefined leave, and persuasion targets whose new
/// quantity is nonzero or undefined enter. Re-verifies resource-safety and
/// throws std::invalid_argument on violation, std::overflow_error on overflow.
State apply(const Framework& fw, const State& s, const std::vector<TripleIndex>& lambda);

struct TransitionEdge {
  std::vector<ArgIndex> union_set;
  std::vector<TripleIndex> lambda;
  State to;
};

struct SuccessorList {
  std::vector<TransitionEdge> edges;   // canonical order: by union set, then lambda
  bool truncated = false;
};

/// Every (union set, valid persuasion set) pair and the state it produces.
/// Distinct labels reaching identical states remain distinct edges.
SuccessorList successors(const Framework& fw, const State& s, std::size_t cap);

}  // namespace napa
