#include "napa/explorer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <unordered_map>

#include "napa/hash.hpp"
#include "napa/semantics.hpp"

namespace napa {

std::optional<std::uint32_t> StateGraph::find(const State& s) const {
  for (std::uint32_t i = 0; i < states.size(); ++i)
    if (states[i] == s) return i;
  return std::nullopt;
}

namespace {

struct Frontier {
  std::vector<State> states;
  std::unordered_map<State, std::uint32_t, StateHasher> index;
  bool truncated = false;

  std::uint32_t push_initial(State s) {
    index.emplace(s, 0);
    states.push_back(std::move(s));
    return 0;
  }

  // Returns the id, or nullopt when the cap refused an insertion.
  std::optional<std::uint32_t> intern(const State& s, std::size_t max_states) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    if (states.size() >= max_states) {
      truncated = true;
      return std::nullopt;
    }
    auto id = static_cast<std::uint32_t>(states.size());
    index.emplace(s, id);
    states.push_back(s);
    return id;
  }
};

}  // namespace

StateGraph explore(const Framework& fw, std::size_t max_states, std::size_t lambda_cap) {
  StateGraph g;
  if (max_states == 0) {
    max_states = 1;   // the initial state is always part of the graph
    g.truncated = true;
  }
  Frontier frontier;
  frontier.push_initial(initial_state(fw));

  for (std::uint32_t cur = 0; cur < frontier.states.size(); ++cur) {
    // Copy: successors may grow frontier.states and invalidate references.
    const State s = frontier.states[cur];
    SuccessorList next = successors(fw, s, lambda_cap);
    if (next.truncated) g.truncated = true;
    for (auto& e : next.edges) {
      auto to = frontier.intern(e.to, max_states);
      if (!to) continue;   // cap hit; edge endpoint would be outside the graph
      g.edges.push_back({cur, *to, std::move(e.union_set), std::move(e.lambda)});
    }
  }
  g.states = std::move(frontier.states);
  g.truncated = g.truncated || frontier.truncated;
  return g;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

namespace {

void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

bool eat(const std::string& s, std::size_t& i, std::string_view word) {
  if (s.compare(i, word.size(), word) == 0) {
    i += word.size();
    return true;
  }
  return false;
}

std::optional<std::string> parse_paren_id(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size() || s[i] != '(') return std::nullopt;
  ++i;
  skip_ws(s, i);
  std::size_t start = i;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  if (start == i) return std::nullopt;
  std::string id = s.substr(start, i - start);
  skip_ws(s, i);
  if (i >= s.size() || s[i] != ')') return std::nullopt;
  ++i;
  return id;
}

}  // namespace

QueryParse parse_query(const Framework& fw, const std::string& text) {
  Query q;
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    QueryParse r;
    r.error = msg;
    return r;
  };

  while (true) {
    skip_ws(text, i);
    QueryAtom atom;
    bool negated = false;
    if (eat(text, i, "!")) {
      skip_ws(text, i);
      negated = true;
    } else if (eat(text, i, "not-")) {
      negated = true;
    }

    if (eat(text, i, "visible")) {
      auto id = parse_paren_id(text, i);
      if (!id) return fail("expected '(argument)' after 'visible'");
      auto a = fw.find_arg(*id);
      if (!a) return fail("unknown argument '" + *id + "'");
      atom.kind = negated ? QueryAtom::Kind::not_visible : QueryAtom::Kind::visible;
      atom.arg = *a;
    } else if (!negated && eat(text, i, "qty")) {
      auto id = parse_paren_id(text, i);
      if (!id) return fail("expected '(argument)' after 'qty'");
      auto a = fw.find_arg(*id);
      if (!a) return fail("unknown argument '" + *id + "'");
      if (!fw.is_resource(*a))
        return fail("'" + *id + "' is not a resource argument");
      atom.kind = QueryAtom::Kind::qty_cmp;
      atom.arg = *a;
      skip_ws(text, i);
      if (eat(text, i, "==")) atom.rel = QueryAtom::Rel::eq;
      else if (eat(text, i, "<=")) atom.rel = QueryAtom::Rel::le;
      else if (eat(text, i, ">=")) atom.rel = QueryAtom::Rel::ge;
      else if (eat(text, i, "<")) atom.rel = QueryAtom::Rel::lt;
      else if (eat(text, i, ">")) atom.rel = QueryAtom::Rel::gt;
      else return fail("expected one of ==, <, <=, >, >= after qty(...)");
      skip_ws(text, i);
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (start == i) return fail("expected a number");
      Quantity v = 0;
      auto [p, ec] = std::from_chars(text.data() + start, text.data() + i, v);
      if (ec != std::errc() || p != text.data() + i) return fail("number out of range");
      atom.value = v;
    } else {
      return fail("expected 'visible(...)', '!visible(...)' or 'qty(...)'");
    }
    q.atoms.push_back(atom);

    skip_ws(text, i);
    if (i == text.size()) break;
    if (!eat(text, i, "&&")) return fail("expected '&&' between atoms");
  }
  if (q.atoms.empty()) return fail("empty query");
  QueryParse r;
  r.query = std::move(q);
  return r;
}

bool eval_query(const Query& q, const State& s) {
  for (const auto& atom : q.atoms) {
    switch (atom.kind) {
      case QueryAtom::Kind::visible:
        if (!s.is_visible(atom.arg)) return false;
        break;
      case QueryAtom::Kind::not_visible:
        if (s.is_visible(atom.arg)) return false;
        break;
      case QueryAtom::Kind::qty_cmp: {
        auto v = quantity_of(s.quantities, atom.arg);
        if (!v) return false;
        bool ok = false;
        switch (atom.rel) {
          case QueryAtom::Rel::eq: ok = *v == atom.value; break;
          case QueryAtom::Rel::lt: ok = *v < atom.value; break;
          case QueryAtom::Rel::le: ok = *v <= atom.value; break;
          case QueryAtom::Rel::gt: ok = *v > atom.value; break;
          case QueryAtom::Rel::ge: ok = *v >= atom.value; break;
        }
        if (!ok) return false;
        break;
      }
    }
  }
  return true;
}

std::string query_to_string(const Framework& fw, const Query& q) {
  std::string out;
  for (std::size_t i = 0; i < q.atoms.size(); ++i) {
    if (i) out += " && ";
    const auto& atom = q.atoms[i];
    switch (atom.kind) {
      case QueryAtom::Kind::visible:
        out += "visible(" + fw.arg_id(atom.arg) + ")";
        break;
      case QueryAtom::Kind::not_visible:
        out += "!visible(" + fw.arg_id(atom.arg) + ")";
        break;
      case QueryAtom::Kind::qty_cmp: {
        const char* rel = "==";
        switch (atom.rel) {
          case QueryAtom::Rel::eq: rel = "=="; break;
          case QueryAtom::Rel::lt: rel = "<"; break;
          case QueryAtom::Rel::le: rel = "<="; break;
          case QueryAtom::Rel::gt: rel = ">"; break;
          case QueryAtom::Rel::ge: rel = ">="; break;
        }
        out += "qty(" + fw.arg_id(atom.arg) + ") " + rel + " " + std::to_string(atom.value);
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reachability with witness extraction
// ---------------------------------------------------------------------------

ReachResult check_reachable(const Framework& fw, const Query& q, std::size_t max_states,
                            std::size_t lambda_cap) {
  ReachResult result;
  Frontier frontier;
  struct Parent {
    std::uint32_t pred = 0;
    std::vector<ArgIndex> union_set;
    std::vector<TripleIndex> lambda;
  };
  std::vector<std::optional<Parent>> parents;

  auto witness = [&](std::uint32_t id) {
    Trace t;
    std::vector<std::uint32_t> chain;
    for (std::uint32_t cur = id; parents[cur]; cur = parents[cur]->pred) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    for (std::uint32_t cur : chain) {
      TraceStep step;
      step.union_set = parents[cur]->union_set;
      step.lambda = parents[cur]->lambda;
      step.result = frontier.states[cur];
      t.steps.push_back(std::move(step));
    }
    result.kind = ReachResult::Kind::witness;
    result.trace = std::move(t);
    result.explored = frontier.states.size();
    return result;
  };

  if (max_states == 0) {
    result.kind = ReachResult::Kind::inconclusive;
    return result;
  }
  frontier.push_initial(initial_state(fw));
  parents.emplace_back(std::nullopt);
  if (eval_query(q, frontier.states[0])) return witness(0);

  bool lambda_truncated = false;
  for (std::uint32_t cur = 0; cur < frontier.states.size(); ++cur) {
    const State s = frontier.states[cur];
    SuccessorList next = successors(fw, s, lambda_cap);
    lambda_truncated = lambda_truncated || next.truncated;
    for (auto& e : next.edges) {
      const std::size_t before = frontier.states.size();
      auto to = frontier.intern(e.to, max_states);
      if (!to) continue;
      if (*to == before) {   // genuinely new state
        parents.emplace_back(Parent{cur, std::move(e.union_set), std::move(e.lambda)});
        if (eval_query(q, frontier.states[*to])) return witness(*to);
      }
    }
  }

  result.explored = frontier.states.size();
  result.kind = (frontier.truncated || lambda_truncated) ? ReachResult::Kind::inconclusive
                                                         : ReachResult::Kind::not_found;
  return result;
}

// ---------------------------------------------------------------------------
// Trace text form
// ---------------------------------------------------------------------------

std::string trace_to_text(const Framework& fw, const Trace& t) {
  std::string out = hash_hex(fw.content_hash());
  out += "\n";
  for (const auto& step : t.steps) {
    std::string line;
    for (std::size_t i = 0; i < step.union_set.size(); ++i) {
      if (i) line += " ";
      line += fw.arg_id(step.union_set[i]);
    }
    line += " | ";
    for (std::size_t i = 0; i < step.lambda.size(); ++i) {
      if (i) line += " ";
      line += fw.triple_text(step.lambda[i]);
    }
    line += " | ";
    for (std::size_t i = 0; i < step.result.visible.size(); ++i) {
      if (i) line += " ";
      line += fw.arg_id(step.result.visible[i]);
    }
    line += " | ";
    for (std::size_t i = 0; i < step.result.quantities.size(); ++i) {
      if (i) line += " ";
      line += fw.arg_id(step.result.quantities[i].first);
      line += "=";
      line += std::to_string(step.result.quantities[i].second);
    }
    out += line;
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::string> tokens_of(const std::string& field) {
  std::vector<std::string> out;
  std::istringstream in(field);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ReplayResult replay(const Framework& fw, const std::string& trace_text) {
  auto fail = [](std::size_t step, std::string reason) {
    ReplayResult r;
    r.verified = false;
    r.failed_step = step;
    r.reason = std::move(reason);
    return r;
  };

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : trace_text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li == lines.size()) return fail(0, "empty trace");
  if (trim(lines[li]) != hash_hex(fw.content_hash()))
    return fail(0, "framework hash mismatch");
  ++li;

  State cur = initial_state(fw);
  std::size_t step_no = 0;
  for (; li < lines.size(); ++li) {
    const std::string line = trim(lines[li]);
    if (line.empty()) continue;
    ++step_no;

    auto fields = split_fields(line, '|');
    if (fields.size() != 4) return fail(step_no, "malformed step line (expected 4 fields)");

    std::vector<ArgIndex> union_set;
    for (const auto& tok : tokens_of(fields[0])) {
      auto a = fw.find_arg(tok);
      if (!a) return fail(step_no, "unknown argument '" + tok + "'");
      union_set.push_back(*a);
    }
    std::sort(union_set.begin(), union_set.end());
    union_set.erase(std::unique(union_set.begin(), union_set.end()), union_set.end());

    std::vector<TripleIndex> lambda;
    for (const auto& tok : tokens_of(fields[1])) {
      if (tok.size() < 2 || tok.front() != '(' || tok.back() != ')')
        return fail(step_no, "malformed persuasion '" + tok + "'");
      auto parts = split_fields(tok.substr(1, tok.size() - 2), ',');
      if (parts.size() != 3) return fail(step_no, "malformed persuasion '" + tok + "'");
      std::optional<std::string> middle;
      if (trim(parts[1]) != "eps") middle = trim(parts[1]);
      try {
        lambda.push_back(fw.triple_index(trim(parts[0]), middle, trim(parts[2])));
      } catch (const std::invalid_argument& e) {
        return fail(step_no, e.what());
      }
    }

    State recorded;
    for (const auto& tok : tokens_of(fields[2])) {
      auto a = fw.find_arg(tok);
      if (!a) return fail(step_no, "unknown argument '" + tok + "'");
      recorded.visible.push_back(*a);
    }
    std::sort(recorded.visible.begin(), recorded.visible.end());
    for (const auto& tok : tokens_of(fields[3])) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) return fail(step_no, "malformed quantity '" + tok + "'");
      auto a = fw.find_arg(tok.substr(0, eq));
      if (!a) return fail(step_no, "unknown argument '" + tok.substr(0, eq) + "'");
      Quantity v = 0;
      const std::string num = tok.substr(eq + 1);
      auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc() || p != num.data() + num.size())
        return fail(step_no, "malformed quantity '" + tok + "'");
      recorded.quantities.emplace_back(*a, v);
    }
    std::sort(recorded.quantities.begin(), recorded.quantities.end());

    const auto unions = multi_agent_union_sets(fw, cur);
    if (!std::binary_search(unions.begin(), unions.end(), union_set))
      return fail(step_no, "not a multi-agent union set in this state");
    std::vector<TripleIndex> base;
    try {
      base = lambda_base(fw, cur, union_set);
    } catch (const std::invalid_argument& e) {
      return fail(step_no, e.what());
    }
    SetValidity v = is_valid_persuasion_set(fw, cur, lambda, base);
    if (!v.valid()) {
      std::string label;
      switch (v.code) {
        case SetValidity::Code::empty: label = "empty persuasion set"; break;
        case SetValidity::Code::not_in_base: label = "not possible"; break;
        case SetValidity::Code::handshake: label = "handshake-compatibility"; break;
        case SetValidity::Code::resource_safety: label = "resource-safety"; break;
        default: label = "invalid"; break;
      }
      return fail(step_no, label + " " + v.offender + (v.detail.empty() ? "" : ": " + v.detail));
    }

    State next = apply(fw, cur, lambda);
    if (!(next == recorded)) return fail(step_no, "state mismatch");
    cur = std::move(next);
  }

  ReplayResult r;
  r.verified = true;
  return r;
}

}  // namespace napa
