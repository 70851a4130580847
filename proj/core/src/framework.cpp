#include "napa/framework.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "napa/dsl.hpp"
#include "napa/hash.hpp"

namespace napa {

std::string to_string(Sem s) {
  switch (s) {
    case Sem::complete: return "co";
    case Sem::preferred: return "pr";
    case Sem::grounded: return "gr";
  }
  return "?";
}

std::string sem_long_name(Sem s) {
  switch (s) {
    case Sem::complete: return "complete";
    case Sem::preferred: return "preferred";
    case Sem::grounded: return "grounded";
  }
  return "?";
}

std::optional<Sem> sem_from_string(const std::string& s) {
  if (s == "co") return Sem::complete;
  if (s == "pr") return Sem::preferred;
  if (s == "gr") return Sem::grounded;
  return std::nullopt;
}

std::string to_string(const TripleRef& t) {
  std::string out = "(";
  out += t.source;
  out += ",";
  out += t.middle ? *t.middle : std::string("eps");
  out += ",";
  out += t.target;
  out += ")";
  return out;
}

std::optional<Quantity> quantity_of(const QuantityMap& q, ArgIndex a) {
  auto it = std::lower_bound(q.begin(), q.end(), a,
                             [](const auto& p, ArgIndex x) { return p.first < x; });
  if (it != q.end() && it->first == a) return it->second;
  return std::nullopt;
}

bool State::is_visible(ArgIndex a) const {
  return std::binary_search(visible.begin(), visible.end(), a);
}

std::size_t StateHasher::operator()(const State& s) const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  };
  for (ArgIndex a : s.visible) mix(a + 1);
  mix(0xfeedfaceull);
  for (const auto& [a, n] : s.quantities) {
    mix(a + 1);
    mix(n);
  }
  return static_cast<std::size_t>(h);
}

Quantity checked_add(Quantity a, Quantity b) {
  Quantity r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("quantity overflow");
  return r;
}

InvalidFramework::InvalidFramework(ValidationReport report)
    : std::runtime_error(report.violations.empty()
                             ? std::string("invalid framework")
                             : "invalid framework: " + report.violations.front().rule + " (" +
                                   report.violations.front().subject + ")"),
      report_(std::move(report)) {}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct DefIndex {
  std::set<std::string> args;
  std::set<TripleRef> triples;
  std::map<std::string, Quantity> qty;

  bool is_resource(const std::string& a) const { return qty.count(a) != 0; }
};

DefIndex index_def(const FrameworkDef& def) {
  DefIndex ix;
  for (const auto& a : def.arguments) ix.args.insert(a.id);
  for (const auto& p : def.persuasions) ix.triples.insert(p.triple);
  for (const auto& q : def.quantities)
    if (ix.qty.find(q.arg) == ix.qty.end()) ix.qty.emplace(q.arg, q.value);
  return ix;
}

void check_term(const DefIndex& ix, const TermDef& t, const Span& span,
                const std::string& subject, std::vector<Violation>& out) {
  switch (t.kind) {
    case TermDef::Kind::literal:
      break;
    case TermDef::Kind::arg_ref:
      if (!ix.args.count(t.arg))
        out.push_back({"constraint-unknown-arg", subject,
                       "constraint refers to unknown argument '" + t.arg + "'", span});
      break;
    case TermDef::Kind::triple_ref:
      if (!t.triple.is_conversion())
        out.push_back({"constraint-triple-not-conversion", subject,
                       "amount reference " + to_string(t.triple) + " must name a conversion",
                       span});
      else if (!ix.triples.count(t.triple))
        out.push_back({"constraint-unknown-triple", subject,
                       "constraint refers to unknown persuasion " + to_string(t.triple), span});
      break;
  }
}

void check_constraint(const DefIndex& ix, const ConstraintDef& c, const Span& span,
                      const std::string& subject, std::vector<Violation>& out) {
  for (const auto& cmp : c) {
    check_term(ix, cmp.lhs, span, subject, out);
    check_term(ix, cmp.rhs, span, subject, out);
  }
}

}  // namespace

ValidationReport validate(const FrameworkDef& def) {
  ValidationReport report;
  auto& out = report.violations;
  DefIndex ix = index_def(def);

  if (def.arguments.empty())
    out.push_back({"args-nonempty", "", "the argument set must not be empty", {}});

  {
    std::set<std::string> seen;
    for (const auto& a : def.arguments)
      if (!seen.insert(a.id).second)
        out.push_back({"arg-duplicate", a.id, "argument '" + a.id + "' declared twice", a.span});
  }

  {
    std::set<std::string> seen_agents;
    std::map<std::string, std::string> owner;   // arg -> agent
    for (const auto& ag : def.agents) {
      if (!seen_agents.insert(ag.id).second)
        out.push_back({"agent-duplicate", ag.id, "agent '" + ag.id + "' declared twice", ag.span});
      if (ag.scope.empty())
        out.push_back({"agent-scope-empty", ag.id, "agent '" + ag.id + "' has an empty scope",
                       ag.span});
      std::set<std::string> scope_seen;
      for (const auto& a : ag.scope) {
        if (!ix.args.count(a))
          out.push_back({"agent-scope-unknown-arg", ag.id,
                         "agent '" + ag.id + "' scope names unknown argument '" + a + "'",
                         ag.span});
        if (!scope_seen.insert(a).second) continue;
        auto [it, fresh] = owner.emplace(a, ag.id);
        if (!fresh && it->second != ag.id)
          out.push_back({"scopes-disjoint", a,
                         "argument '" + a + "' is in the scope of both '" + it->second +
                             "' and '" + ag.id + "'",
                         ag.span});
      }
    }
  }

  {
    std::set<std::string> seen;
    for (const auto& q : def.quantities) {
      if (!ix.args.count(q.arg))
        out.push_back({"qty-unknown-arg", q.arg,
                       "quantity declared for unknown argument '" + q.arg + "'", q.span});
      if (!seen.insert(q.arg).second)
        out.push_back({"qty-duplicate", q.arg,
                       "quantity for '" + q.arg + "' declared twice", q.span});
    }
  }

  for (const auto& a : def.initial_visible) {
    if (!ix.args.count(a)) {
      out.push_back({"init-unknown-arg", a, "initial set names unknown argument '" + a + "'",
                     def.initial_visible_span});
    } else {
      auto it = ix.qty.find(a);
      if (it != ix.qty.end() && it->second == 0)
        out.push_back({"init-zero-quantity", a,
                       "'" + a + "' is initially visible but has quantity 0",
                       def.initial_visible_span});
    }
  }

  {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& at : def.attacks) {
      const std::string subject = at.source + " -> " + at.target;
      if (!ix.args.count(at.source))
        out.push_back({"attack-unknown-arg", subject,
                       "attack source '" + at.source + "' is unknown", at.span});
      if (!ix.args.count(at.target))
        out.push_back({"attack-unknown-arg", subject,
                       "attack target '" + at.target + "' is unknown", at.span});
      if (!seen.insert({at.source, at.target}).second)
        out.push_back({"attack-duplicate", subject, "attack declared twice", at.span});
      check_constraint(ix, at.when, at.span, subject, out);
    }
  }

  {
    std::set<TripleRef> seen;
    for (const auto& p : def.persuasions) {
      const std::string subject = to_string(p.triple);
      if (!ix.args.count(p.triple.source))
        out.push_back({"persuasion-unknown-arg", subject,
                       "persuasion source '" + p.triple.source + "' is unknown", p.span});
      if (p.triple.middle && !ix.args.count(*p.triple.middle))
        out.push_back({"persuasion-unknown-arg", subject,
                       "persuasion middle '" + *p.triple.middle + "' is unknown", p.span});
      if (!ix.args.count(p.triple.target))
        out.push_back({"persuasion-unknown-arg", subject,
                       "persuasion target '" + p.triple.target + "' is unknown", p.span});
      if (!seen.insert(p.triple).second)
        out.push_back({"persuasion-duplicate", subject, "persuasion declared twice", p.span});
      check_constraint(ix, p.when, p.span, subject, out);

      if (p.amount) {
        if (!p.triple.is_conversion()) {
          out.push_back({"amount-not-conversion", subject,
                         "an inducement cannot carry an amount", p.span});
        } else {
          if (ix.args.count(*p.triple.middle) && !ix.is_resource(*p.triple.middle))
            out.push_back({"amount-middle-ordinary", subject,
                           "amount on a conversion whose middle '" + *p.triple.middle +
                               "' is an ordinary argument",
                           p.span});
          if (ix.args.count(p.triple.target) && !ix.is_resource(p.triple.target))
            out.push_back({"amount-target-ordinary", subject,
                           "amount on a conversion whose target '" + p.triple.target +
                               "' is an ordinary argument",
                           p.span});
        }
        switch (p.amount->kind) {
          case TermDef::Kind::literal:
            break;
          case TermDef::Kind::arg_ref:
            if (!ix.args.count(p.amount->arg))
              out.push_back({"amount-unknown-arg", subject,
                             "amount refers to unknown argument '" + p.amount->arg + "'",
                             p.span});
            else if (!ix.is_resource(p.amount->arg))
              out.push_back({"amount-arg-ordinary", subject,
                             "amount '$" + p.amount->arg +
                                 "' must name a resource argument",
                             p.span});
            break;
          case TermDef::Kind::triple_ref:
            out.push_back({"amount-kind", subject,
                           "an amount must be a number or a $argument reference", p.span});
            break;
        }
      }
    }

    // Normality: once one conversion on a middle carries an amount, every
    // conversion on that middle must.
    std::map<std::string, bool> middle_has_amount;
    for (const auto& p : def.persuasions)
      if (p.triple.is_conversion() && p.amount) middle_has_amount[*p.triple.middle] = true;
    for (const auto& p : def.persuasions) {
      if (!p.triple.is_conversion() || p.amount) continue;
      auto it = middle_has_amount.find(*p.triple.middle);
      if (it != middle_has_amount.end())
        out.push_back({"amount-normality", to_string(p.triple),
                       "conversion lacks an amount while another conversion on middle '" +
                           *p.triple.middle + "' has one",
                       p.span});
    }
  }

  {
    std::set<std::pair<TripleRef, TripleRef>> entries;
    for (const auto& h : def.handshakes) entries.insert({h.a, h.b});
    for (const auto& h : def.handshakes) {
      const std::string subject = to_string(h.a) + " ~ " + to_string(h.b);
      bool known = true;
      for (const TripleRef* t : {&h.a, &h.b}) {
        if (!ix.triples.count(*t)) {
          out.push_back({"handshake-unknown-triple", subject,
                         "handshake names unknown persuasion " + to_string(*t), h.span});
          known = false;
        }
      }
      if (h.a == h.b)
        out.push_back({"handshake-self", subject,
                       "a persuasion cannot handshake with itself", h.span});
      else if (known && !entries.count({h.b, h.a}))
        out.push_back({"handshake-symmetric", subject,
                       "handshake lists " + to_string(h.b) + " as partner of " + to_string(h.a) +
                           " but not the converse",
                       h.span});
    }
  }

  return report;
}

// ---------------------------------------------------------------------------
// Compile
// ---------------------------------------------------------------------------

namespace {

// eps orders before any argument.
std::uint64_t middle_key(const std::optional<ArgIndex>& m) {
  return m ? static_cast<std::uint64_t>(*m) + 1 : 0;
}

bool triple_less(const Triple& a, const Triple& b) {
  return std::tuple(a.source, middle_key(a.middle), a.target) <
         std::tuple(b.source, middle_key(b.middle), b.target);
}

}  // namespace

Framework Framework::compile(const FrameworkDef& def) {
  ValidationReport report = validate(def);
  if (!report.ok()) throw InvalidFramework(std::move(report));

  Framework fw;
  std::vector<std::pair<std::string, std::string>> args;
  args.reserve(def.arguments.size());
  for (const auto& a : def.arguments) args.emplace_back(a.id, a.label);
  std::sort(args.begin(), args.end());
  for (auto& [id, label] : args) {
    fw.arg_ids_.push_back(id);
    fw.arg_labels_.push_back(label);
  }

  auto arg_of = [&fw](const std::string& id) { return fw.arg(id); };

  fw.is_resource_.assign(fw.arg_ids_.size(), false);
  for (const auto& q : def.quantities) {
    fw.initial_quantities_.emplace_back(arg_of(q.arg), q.value);
    fw.is_resource_[arg_of(q.arg)] = true;
  }
  std::sort(fw.initial_quantities_.begin(), fw.initial_quantities_.end());

  for (const auto& ag : def.agents) {
    AgentInfo info;
    info.id = ag.id;
    info.sem = ag.sem;
    for (const auto& a : ag.scope) info.scope.push_back(arg_of(a));
    std::sort(info.scope.begin(), info.scope.end());
    info.scope.erase(std::unique(info.scope.begin(), info.scope.end()), info.scope.end());
    fw.agents_.push_back(std::move(info));
  }
  std::sort(fw.agents_.begin(), fw.agents_.end(),
            [](const AgentInfo& a, const AgentInfo& b) { return a.id < b.id; });

  for (const auto& a : def.initial_visible) fw.initial_visible_.push_back(arg_of(a));
  std::sort(fw.initial_visible_.begin(), fw.initial_visible_.end());
  fw.initial_visible_.erase(std::unique(fw.initial_visible_.begin(), fw.initial_visible_.end()),
                            fw.initial_visible_.end());

  // Persuasions first: constraint terms may refer to them by index.
  struct PendingPersuasion {
    Triple triple;
    const FrameworkDef::Persuasion* src = nullptr;
  };
  std::vector<PendingPersuasion> pending;
  for (const auto& p : def.persuasions) {
    Triple t;
    t.source = arg_of(p.triple.source);
    if (p.triple.middle) t.middle = arg_of(*p.triple.middle);
    t.target = arg_of(p.triple.target);
    pending.push_back({t, &p});
  }
  std::sort(pending.begin(), pending.end(),
            [](const PendingPersuasion& a, const PendingPersuasion& b) {
              return triple_less(a.triple, b.triple);
            });
  for (const auto& p : pending) fw.persuasions_.push_back(p.triple);

  auto resolve_term = [&](const TermDef& t) -> Term {
    switch (t.kind) {
      case TermDef::Kind::literal:
        return Term{Term::Kind::literal, t.value, 0};
      case TermDef::Kind::arg_ref:
        return Term{Term::Kind::arg_ref, 0, arg_of(t.arg)};
      case TermDef::Kind::triple_ref:
        return Term{Term::Kind::triple_ref, 0,
                    fw.triple_index(t.triple.source, t.triple.middle, t.triple.target)};
    }
    throw std::logic_error("unreachable term kind");
  };
  auto resolve_constraint = [&](const ConstraintDef& c) -> Constraint {
    Constraint out;
    for (const auto& cmp : c)
      out.push_back({resolve_term(cmp.lhs), cmp.op, resolve_term(cmp.rhs)});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  fw.persuasion_when_.resize(fw.persuasions_.size());
  fw.amounts_.resize(fw.persuasions_.size());
  fw.handshake_.resize(fw.persuasions_.size());
  for (const auto& p : pending) {
    TripleIndex i = *fw.find_triple(p.triple);
    fw.persuasion_when_[i] = resolve_constraint(p.src->when);
    if (p.src->amount) fw.amounts_[i] = resolve_term(*p.src->amount);
  }

  for (const auto& at : def.attacks) {
    AttackInfo info;
    info.source = arg_of(at.source);
    info.target = arg_of(at.target);
    info.when = resolve_constraint(at.when);
    fw.attacks_.push_back(std::move(info));
  }
  std::sort(fw.attacks_.begin(), fw.attacks_.end(),
            [](const AttackInfo& a, const AttackInfo& b) {
              return std::pair(a.source, a.target) < std::pair(b.source, b.target);
            });

  for (const auto& h : def.handshakes) {
    TripleIndex a = fw.triple_index(h.a.source, h.a.middle, h.a.target);
    TripleIndex b = fw.triple_index(h.b.source, h.b.middle, h.b.target);
    fw.handshake_[a].push_back(b);
    fw.handshake_[b].push_back(a);
  }
  for (auto& hs : fw.handshake_) {
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  }

  fw.content_hash_ = fnv1a(serialize(fw));
  return fw;
}

// ---------------------------------------------------------------------------
// Accessors
// ---------------------------------------------------------------------------

std::optional<ArgIndex> Framework::find_arg(const std::string& id) const {
  auto it = std::lower_bound(arg_ids_.begin(), arg_ids_.end(), id);
  if (it != arg_ids_.end() && *it == id)
    return static_cast<ArgIndex>(it - arg_ids_.begin());
  return std::nullopt;
}

ArgIndex Framework::arg(const std::string& id) const {
  auto i = find_arg(id);
  if (!i) throw std::invalid_argument("unknown argument '" + id + "'");
  return *i;
}

const Framework::AgentInfo& Framework::agent(const std::string& id) const {
  for (const auto& a : agents_)
    if (a.id == id) return a;
  throw std::invalid_argument("unknown agent '" + id + "'");
}

std::optional<TripleIndex> Framework::find_triple(const Triple& t) const {
  auto it = std::lower_bound(persuasions_.begin(), persuasions_.end(), t, triple_less);
  if (it != persuasions_.end() && *it == t)
    return static_cast<TripleIndex>(it - persuasions_.begin());
  return std::nullopt;
}

TripleIndex Framework::triple_index(const std::string& source,
                                    const std::optional<std::string>& middle,
                                    const std::string& target) const {
  Triple t;
  t.source = arg(source);
  if (middle) t.middle = arg(*middle);
  t.target = arg(target);
  auto i = find_triple(t);
  if (!i)
    throw std::invalid_argument("unknown persuasion " +
                                to_string(TripleRef{source, middle, target}));
  return *i;
}

std::string Framework::triple_text(TripleIndex i) const { return triple_text(persuasions_[i]); }

std::string Framework::triple_text(const Triple& t) const {
  TripleRef r;
  r.source = arg_id(t.source);
  if (t.middle) r.middle = arg_id(*t.middle);
  r.target = arg_id(t.target);
  return to_string(r);
}

Term Framework::term_literal(Quantity n) const { return Term{Term::Kind::literal, n, 0}; }

Term Framework::term_arg(const std::string& id) const {
  return Term{Term::Kind::arg_ref, 0, arg(id)};
}

Term Framework::term_triple(const std::string& source, const std::optional<std::string>& middle,
                            const std::string& target) const {
  return Term{Term::Kind::triple_ref, 0, triple_index(source, middle, target)};
}

bool operator==(const Framework& a, const Framework& b) {
  return a.content_hash_ == b.content_hash_ && a.arg_ids_ == b.arg_ids_ &&
         a.arg_labels_ == b.arg_labels_ && a.initial_visible_ == b.initial_visible_ &&
         a.initial_quantities_ == b.initial_quantities_ && a.persuasions_ == b.persuasions_ &&
         a.persuasion_when_ == b.persuasion_when_ && a.amounts_ == b.amounts_ &&
         a.handshake_ == b.handshake_ &&
         [&] {
           if (a.attacks_.size() != b.attacks_.size()) return false;
           for (std::size_t i = 0; i < a.attacks_.size(); ++i) {
             const auto& x = a.attacks_[i];
             const auto& y = b.attacks_[i];
             if (x.source != y.source || x.target != y.target || x.when != y.when) return false;
           }
           if (a.agents_.size() != b.agents_.size()) return false;
           for (std::size_t i = 0; i < a.agents_.size(); ++i) {
             const auto& x = a.agents_[i];
             const auto& y = b.agents_[i];
             if (x.id != y.id || x.sem != y.sem || x.scope != y.scope) return false;
           }
           return true;
         }();
}

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

State initial_state(const Framework& fw) {
  State s;
  s.visible = fw.initial_visible();
  s.quantities = fw.initial_quantities();
  return s;
}

ArgKind classify_argument(const Framework& fw, const std::string& id) {
  return classify_argument(fw, fw.arg(id));
}

ArgKind classify_argument(const Framework& fw, ArgIndex a) {
  if (a >= fw.num_args()) throw std::invalid_argument("argument index out of range");
  return fw.is_resource(a) ? ArgKind::resource : ArgKind::ordinary;
}

std::string render_ids(const Framework& fw, const std::vector<ArgIndex>& ids) {
  std::string out = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += fw.arg_id(ids[i]);
  }
  out += "}";
  return out;
}

std::string state_key(const Framework& fw, const State& s) {
  std::string out = "v:";
  for (std::size_t i = 0; i < s.visible.size(); ++i) {
    if (i) out += ",";
    out += fw.arg_id(s.visible[i]);
  }
  out += "|q:";
  for (std::size_t i = 0; i < s.quantities.size(); ++i) {
    if (i) out += ",";
    out += fw.arg_id(s.quantities[i].first);
    out += "=";
    out += std::to_string(s.quantities[i].second);
  }
  return out;
}

std::uint64_t state_hash(const Framework& fw, const State& s) {
  return fnv1a(state_key(fw, s));
}

}  // namespace napa
