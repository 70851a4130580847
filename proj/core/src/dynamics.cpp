#include "napa/dynamics.hpp"

#include <algorithm>
#include <cassert>

#include "napa/constraints.hpp"
#include "napa/semantics.hpp"

namespace napa {

std::vector<std::pair<ArgIndex, ArgIndex>> adjusted_attacks(const Framework& fw,
                                                            const State& s) {
  std::vector<std::pair<ArgIndex, ArgIndex>> out;
  for (const auto& at : fw.attacks()) {
    if (!s.is_visible(at.source) || !s.is_visible(at.target)) continue;
    if (!sat(fw, at.when, s.quantities)) continue;
    out.emplace_back(at.source, at.target);
  }
  return out;   // fw.attacks() is sorted, so this is too
}

std::vector<TripleIndex> adjusted_persuasions(const Framework& fw, const State& s) {
  std::vector<TripleIndex> out;
  const auto& triples = fw.persuasions();
  for (TripleIndex i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (!s.is_visible(t.source)) continue;
    if (t.middle && !s.is_visible(*t.middle)) continue;
    if (!sat(fw, fw.persuasion_when(i), s.quantities)) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<TripleIndex> possible_persuasions(const Framework& fw, const State& s,
                                              const std::vector<ArgIndex>& ax) {
  std::vector<char> in_ax(fw.num_args(), 0);
  for (ArgIndex a : ax) {
    if (a >= fw.num_args()) throw std::invalid_argument("argument index out of range");
    in_ax[a] = 1;
  }
  std::vector<char> attacked(fw.num_args(), 0);
  for (auto [x, y] : adjusted_attacks(fw, s))
    if (in_ax[x]) attacked[y] = 1;

  std::vector<TripleIndex> out;
  for (TripleIndex i : adjusted_persuasions(fw, s))
    if (!attacked[fw.persuasions()[i].source]) out.push_back(i);
  return out;
}

std::vector<TripleIndex> lambda_base(const Framework& fw, const State& s,
                                     const std::vector<ArgIndex>& ax) {
  std::vector<ArgIndex> sorted_ax = ax;
  std::sort(sorted_ax.begin(), sorted_ax.end());
  sorted_ax.erase(std::unique(sorted_ax.begin(), sorted_ax.end()), sorted_ax.end());

  const auto unions = multi_agent_union_sets(fw, s);
  if (!std::binary_search(unions.begin(), unions.end(), sorted_ax))
    throw std::invalid_argument("not a multi-agent union set in this state");

  bool first = true;
  std::vector<TripleIndex> acc;
  for (const auto& agent : fw.agents()) {
    std::vector<ArgIndex> slice;
    std::set_intersection(sorted_ax.begin(), sorted_ax.end(), agent.scope.begin(),
                          agent.scope.end(), std::back_inserter(slice));
    std::vector<TripleIndex> gamma = possible_persuasions(fw, s, slice);
    if (first) {
      acc = std::move(gamma);
      first = false;
    } else {
      std::vector<TripleIndex> merged;
      std::set_intersection(acc.begin(), acc.end(), gamma.begin(), gamma.end(),
                            std::back_inserter(merged));
      acc = std::move(merged);
    }
    if (acc.empty() && !first) return acc;
  }
  if (first) return possible_persuasions(fw, s, {});   // no agents at all
  return acc;
}

SetValidity is_valid_persuasion_set(const Framework& fw, const State& s,
                                    const std::vector<TripleIndex>& lambda,
                                    const std::vector<TripleIndex>& base) {
  std::vector<TripleIndex> lam = lambda;
  std::sort(lam.begin(), lam.end());
  lam.erase(std::unique(lam.begin(), lam.end()), lam.end());

  if (lam.empty()) return {SetValidity::Code::empty, "", "a persuasion set must be nonempty"};

  for (TripleIndex r : lam) {
    if (r >= fw.persuasions().size())
      return {SetValidity::Code::not_in_base, std::to_string(r),
              "persuasion index out of range"};
    if (!std::binary_search(base.begin(), base.end(), r))
      return {SetValidity::Code::not_in_base, fw.triple_text(r),
              "not a member of the possible-persuasion base"};
  }

  for (TripleIndex r : lam) {
    const auto& partners = fw.handshake(r);
    if (partners.empty()) continue;
    std::size_t present = 0;
    for (TripleIndex p : partners)
      if (std::binary_search(lam.begin(), lam.end(), p)) ++present;
    if (present != 1)
      return {SetValidity::Code::handshake, fw.triple_text(r),
              present == 0 ? "no handshake partner in the set"
                           : std::to_string(present) +
                                 " handshake partners in the set (exactly one required)"};
  }

  // Resource-safety against the pre-transition quantities.
  for (const auto& [a, n] : s.quantities) {
    Quantity inc = 0, dec = 0;
    for (TripleIndex r : lam) {
      const Triple& t = fw.persuasions()[r];
      if (!t.middle || !fw.amount(r)) continue;
      auto v = interpret_term(fw, *fw.amount(r), s.quantities);
      if (!v)
        return {SetValidity::Code::resource_safety, fw.triple_text(r),
                "amount is undefined in this state"};
      if (*t.middle == a) dec = checked_add(dec, *v);
      if (t.target == a) inc = checked_add(inc, *v);
    }
    if (checked_add(n, inc) < dec)
      return {SetValidity::Code::resource_safety, fw.arg_id(a),
              std::to_string(n) + " + " + std::to_string(inc) + " - " + std::to_string(dec) +
                  " < 0"};
  }
  return {};
}

PersuasionSetList enumerate_persuasion_sets(const Framework& fw, const State& s,
                                            const std::vector<ArgIndex>& ax, std::size_t cap) {
  const std::vector<TripleIndex> base = lambda_base(fw, s, ax);
  PersuasionSetList out;

  // Depth-first over index-increasing subsets visits them in canonical
  // (lexicographic) order. Validity is not monotone, so every branch must be
  // explored; truncation is only flagged once a set beyond the cap exists.
  std::vector<TripleIndex> prefix;
  bool stop = false;
  auto rec = [&](auto&& self, std::size_t next) -> void {
    if (stop) return;
    if (!prefix.empty() && is_valid_persuasion_set(fw, s, prefix, base).valid()) {
      if (out.sets.size() < cap) {
        out.sets.push_back(prefix);
      } else {
        out.truncated = true;
        stop = true;
        return;
      }
    }
    for (std::size_t j = next; j < base.size() && !stop; ++j) {
      prefix.push_back(base[j]);
      self(self, j + 1);
      prefix.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

State apply(const Framework& fw, const State& s, const std::vector<TripleIndex>& lambda) {
  std::vector<TripleIndex> lam = lambda;
  std::sort(lam.begin(), lam.end());
  lam.erase(std::unique(lam.begin(), lam.end()), lam.end());
  if (lam.empty()) throw std::invalid_argument("a persuasion set must be nonempty");
  for (TripleIndex r : lam)
    if (r >= fw.persuasions().size())
      throw std::invalid_argument("persuasion index out of range");

  // Quantity update, amounts snapshotted against the pre-transition map.
  QuantityMap next = s.quantities;
  for (auto& [a, n] : next) {
    Quantity inc = 0, dec = 0;
    for (TripleIndex r : lam) {
      const Triple& t = fw.persuasions()[r];
      if (!t.middle || !fw.amount(r)) continue;
      auto v = interpret_term(fw, *fw.amount(r), s.quantities);
      if (!v)
        throw std::invalid_argument("amount of " + fw.triple_text(r) +
                                    " is undefined in this state");
      if (*t.middle == a) dec = checked_add(dec, *v);
      if (t.target == a) inc = checked_add(inc, *v);
    }
    Quantity gained = checked_add(n, inc);
    if (gained < dec)
      throw std::invalid_argument("resource-safety violated at " + fw.arg_id(a));
    n = gained - dec;
  }

  auto new_qty = [&](ArgIndex a) { return quantity_of(next, a); };

  // Leaving: visible conversion middles whose new quantity is 0 or undefined.
  std::vector<ArgIndex> neg;
  for (TripleIndex r : lam) {
    const Triple& t = fw.persuasions()[r];
    if (!t.middle) continue;
    if (!s.is_visible(t.source) || !s.is_visible(*t.middle)) continue;
    auto q = new_qty(*t.middle);
    if (!q || *q == 0) neg.push_back(*t.middle);
  }

  // Entering: persuasion targets whose new quantity is nonzero or undefined.
  std::vector<ArgIndex> pos;
  for (TripleIndex r : lam) {
    const Triple& t = fw.persuasions()[r];
    if (!s.is_visible(t.source)) continue;
    if (t.middle && !s.is_visible(*t.middle)) continue;
    auto q = new_qty(t.target);
    if (!q || *q != 0) pos.push_back(t.target);
  }

  std::sort(neg.begin(), neg.end());
  std::sort(pos.begin(), pos.end());

  State result;
  result.quantities = std::move(next);
  std::set_difference(s.visible.begin(), s.visible.end(), neg.begin(), neg.end(),
                      std::back_inserter(result.visible));
  std::vector<ArgIndex> merged;
  std::merge(result.visible.begin(), result.visible.end(), pos.begin(), pos.end(),
             std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  result.visible = std::move(merged);

#ifndef NDEBUG
  for (ArgIndex a : result.visible)
    if (fw.is_resource(a)) assert(quantity_of(result.quantities, a).value_or(0) > 0);
#endif
  return result;
}

SuccessorList successors(const Framework& fw, const State& s, std::size_t cap) {
  SuccessorList out;
  for (const auto& u : multi_agent_union_sets(fw, s)) {
    PersuasionSetList sets = enumerate_persuasion_sets(fw, s, u, cap);
    out.truncated = out.truncated || sets.truncated;
    for (auto& lam : sets.sets) {
      TransitionEdge e;
      e.union_set = u;
      e.to = apply(fw, s, lam);
      e.lambda = std::move(lam);
      out.edges.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace napa
