#include "napa/semantics.hpp"

#include <algorithm>
#include <stdexcept>

#include "napa/dynamics.hpp"

namespace napa {

namespace {

constexpr std::uint32_t kMaxEnumArgs = 30;

using Mask = std::uint64_t;

std::vector<std::uint32_t> mask_to_vec(Mask m, const std::vector<std::uint32_t>& universe) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (m & (Mask{1} << i)) out.push_back(universe[i]);
  return out;
}

void keep_maximal(std::vector<Mask>& sets) {
  std::vector<Mask> maximal;
  for (Mask a : sets) {
    bool dominated = false;
    for (Mask b : sets)
      if (a != b && (a & b) == a) {
        dominated = true;
        break;
      }
    if (!dominated) maximal.push_back(a);
  }
  sets = std::move(maximal);
}

std::vector<std::vector<std::uint32_t>> finish(const std::vector<Mask>& masks,
                                               const std::vector<std::uint32_t>& universe) {
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(masks.size());
  for (Mask m : masks) out.push_back(mask_to_vec(m, universe));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> dung_extensions(const AttackGraph& af, Sem sem) {
  const std::uint32_t n = af.num_args;
  if (n > kMaxEnumArgs)
    throw std::length_error("exact semantics enumeration is limited to " +
                            std::to_string(kMaxEnumArgs) + " arguments");
  for (auto [x, y] : af.attacks)
    if (x >= n || y >= n) throw std::invalid_argument("attack endpoint out of range");

  std::vector<Mask> attackers(n, 0), targets(n, 0);
  for (auto [x, y] : af.attacks) {
    attackers[y] |= Mask{1} << x;
    targets[x] |= Mask{1} << y;
  }

  std::vector<Mask> admissible, complete;
  const Mask limit = n == 0 ? 1 : (Mask{1} << n);
  for (Mask s = 0; s < limit; ++s) {
    Mask attacked = 0;
    bool cf = true;
    for (std::uint32_t i = 0; i < n && cf; ++i)
      if (s & (Mask{1} << i)) {
        if (attackers[i] & s) cf = false;
        attacked |= targets[i];
      }
    if (!cf) continue;
    bool adm = true;
    for (std::uint32_t i = 0; i < n && adm; ++i)
      if ((s & (Mask{1} << i)) && (attackers[i] & ~attacked)) adm = false;
    if (!adm) continue;
    admissible.push_back(s);
    bool comp = true;
    for (std::uint32_t i = 0; i < n && comp; ++i)
      if (!(s & (Mask{1} << i)) && (attackers[i] & ~attacked) == 0) comp = false;
    if (comp) complete.push_back(s);
  }

  std::vector<std::uint32_t> universe(n);
  for (std::uint32_t i = 0; i < n; ++i) universe[i] = i;

  switch (sem) {
    case Sem::complete:
      return finish(complete, universe);
    case Sem::preferred:
      keep_maximal(admissible);
      return finish(admissible, universe);
    case Sem::grounded: {
      Mask inter = complete.empty() ? 0 : ~Mask{0};
      for (Mask m : complete) inter &= m;
      return finish({inter}, universe);
    }
  }
  throw std::logic_error("unreachable semantics");
}

std::vector<std::uint32_t> grounded_fixpoint(const AttackGraph& af) {
  const std::uint32_t n = af.num_args;
  std::vector<std::vector<std::uint32_t>> attackers(n);
  std::vector<std::vector<std::uint32_t>> targets(n);
  for (auto [x, y] : af.attacks) {
    if (x >= n || y >= n) throw std::invalid_argument("attack endpoint out of range");
    attackers[y].push_back(x);
    targets[x].push_back(y);
  }
  std::vector<char> in(n, 0), attacked(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t a = 0; a < n; ++a) {
      if (in[a]) continue;
      bool defended = true;
      for (std::uint32_t u : attackers[a])
        if (!attacked[u]) {
          defended = false;
          break;
        }
      if (defended) {
        in[a] = 1;
        for (std::uint32_t t : targets[a]) attacked[t] = 1;
        changed = true;
      }
    }
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t a = 0; a < n; ++a)
    if (in[a]) out.push_back(a);
  return out;
}

ExtensionSet agent_extensions(const Framework& fw, const State& s, const std::string& agent) {
  const auto& info = fw.agent(agent);

  // Candidates live in scope ∩ visible; attackers live in the whole visible
  // constraint-adjusted graph.
  std::vector<ArgIndex> pool;
  for (ArgIndex a : info.scope)
    if (s.is_visible(a)) pool.push_back(a);
  if (pool.size() > kMaxEnumArgs)
    throw std::length_error("exact semantics enumeration is limited to " +
                            std::to_string(kMaxEnumArgs) + " arguments per agent");

  const auto adj = adjusted_attacks(fw, s);

  std::vector<int> pos_of(fw.num_args(), -1);
  for (std::size_t i = 0; i < pool.size(); ++i) pos_of[pool[i]] = static_cast<int>(i);

  // For each visible argument: who attacks it, and which pool members attack it.
  std::vector<std::vector<ArgIndex>> attackers(fw.num_args());
  std::vector<Mask> pool_attackers_of(fw.num_args(), 0);
  std::vector<Mask> intra_attackers(pool.size(), 0);
  for (auto [x, y] : adj) {
    attackers[y].push_back(x);
    if (pos_of[x] >= 0) {
      pool_attackers_of[y] |= Mask{1} << pos_of[x];
      if (pos_of[y] >= 0) intra_attackers[pos_of[y]] |= Mask{1} << pos_of[x];
    }
  }

  auto defends = [&](Mask set, ArgIndex a) {
    for (ArgIndex u : attackers[a])
      if ((pool_attackers_of[u] & set) == 0) return false;
    return true;
  };

  std::vector<Mask> complete;
  const Mask limit = pool.empty() ? 1 : (Mask{1} << pool.size());
  for (Mask set = 0; set < limit; ++set) {
    bool ok = true;
    for (std::size_t i = 0; i < pool.size() && ok; ++i)
      if (set & (Mask{1} << i)) {
        if (intra_attackers[i] & set) ok = false;             // conflict-free
        else if (!defends(set, pool[i])) ok = false;          // self-defence
      }
    if (!ok) continue;
    for (std::size_t i = 0; i < pool.size() && ok; ++i)
      if (!(set & (Mask{1} << i)) && defends(set, pool[i])) ok = false;   // completeness
    if (ok) complete.push_back(set);
  }

  ExtensionSet result;
  result.agent = info.id;
  result.sem = info.sem;
  switch (info.sem) {
    case Sem::complete:
      result.extensions = finish(complete, pool);
      break;
    case Sem::preferred: {
      keep_maximal(complete);
      result.extensions = finish(complete, pool);
      break;
    }
    case Sem::grounded: {
      if (complete.empty()) break;   // degenerate: no acceptable stance at all
      Mask inter = ~Mask{0};
      for (Mask m : complete) inter &= m;
      result.extensions = finish({inter}, pool);
      break;
    }
  }
  return result;
}

std::vector<std::vector<ArgIndex>> multi_agent_union_sets(const Framework& fw, const State& s) {
  // No agents: the only choice vector is empty, and its union is the empty set.
  std::vector<std::vector<ArgIndex>> acc = {{}};
  for (const auto& agent : fw.agents()) {
    ExtensionSet ext = agent_extensions(fw, s, agent.id);
    if (ext.extensions.empty()) return {};
    std::vector<std::vector<ArgIndex>> next;
    next.reserve(acc.size() * ext.extensions.size());
    for (const auto& base : acc) {
      for (const auto& choice : ext.extensions) {
        std::vector<ArgIndex> merged;
        merged.reserve(base.size() + choice.size());
        std::merge(base.begin(), base.end(), choice.begin(), choice.end(),
                   std::back_inserter(merged));
        next.push_back(std::move(merged));
      }
    }
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  return acc;
}

}  // namespace napa
