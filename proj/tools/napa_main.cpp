// Command-line front end: validate scenario files, compute per-agent
// semantics, list transitions, explore the reachable state space, replay
// traces, and step through a negotiation interactively.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "napa/constraints.hpp"
#include "napa/dsl.hpp"
#include "napa/dynamics.hpp"
#include "napa/explorer.hpp"
#include "napa/hash.hpp"
#include "napa/semantics.hpp"

using json = nlohmann::json;

namespace {

// Exit codes are part of the interface and stable across releases.
enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,   // parse, validation or replay failure
  kNotReachable = 2,
  kInconclusive = 3,
  kInternalError = 4,
};

struct Options {
  std::string file;
  std::string format = "text";
  std::size_t max_states = 100000;
  std::string trace_out;
  std::string query;
  std::string state_hash;
  std::string trace_file;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

napa::Framework load_or_exit(const Options& opt) {
  std::string text = read_file(opt.file);
  napa::ParseResult result = napa::parse(text);
  for (const auto& d : result.diagnostics)
    std::cerr << napa::format_diagnostic(opt.file, d) << "\n";
  if (!result.ok()) std::exit(kInvalidInput);
  return std::move(*result.framework);
}

std::string state_line(const napa::Framework& fw, const napa::State& s) {
  std::string out = napa::hash_hex(napa::state_hash(fw, s));
  out += "  visible " + napa::render_ids(fw, s.visible);
  if (!s.quantities.empty()) {
    out += "  qty {";
    for (std::size_t i = 0; i < s.quantities.size(); ++i) {
      if (i) out += ", ";
      out += fw.arg_id(s.quantities[i].first) + "=" + std::to_string(s.quantities[i].second);
    }
    out += "}";
  }
  return out;
}

json state_json(const napa::Framework& fw, const napa::State& s) {
  json j;
  j["hash"] = napa::hash_hex(napa::state_hash(fw, s));
  j["visible"] = json::array();
  for (auto a : s.visible) j["visible"].push_back(fw.arg_id(a));
  j["qty"] = json::object();
  for (const auto& [a, n] : s.quantities) j["qty"][fw.arg_id(a)] = n;
  return j;
}

json ids_json(const napa::Framework& fw, const std::vector<napa::ArgIndex>& ids) {
  json j = json::array();
  for (auto a : ids) j.push_back(fw.arg_id(a));
  return j;
}

json lambda_json(const napa::Framework& fw, const std::vector<napa::TripleIndex>& lam) {
  json j = json::array();
  for (auto t : lam) j.push_back(fw.triple_text(t));
  return j;
}

std::string lambda_text(const napa::Framework& fw, const std::vector<napa::TripleIndex>& lam) {
  std::string out = "{";
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (i) out += ", ";
    out += fw.triple_text(lam[i]);
  }
  out += "}";
  return out;
}

// Resolves --state against the explored graph; defaults to the initial state.
napa::State resolve_state(const napa::Framework& fw, const Options& opt) {
  if (opt.state_hash.empty()) return napa::initial_state(fw);
  napa::StateGraph g = napa::explore(fw, opt.max_states);
  for (const auto& s : g.states)
    if (napa::hash_hex(napa::state_hash(fw, s)) == opt.state_hash) return s;
  std::cerr << "state " << opt.state_hash << " not found within " << g.states.size()
            << " explored states" << (g.truncated ? " (graph truncated)" : "") << "\n";
  std::exit(g.truncated ? kInconclusive : kNotReachable);
}

json trace_json(const napa::Framework& fw, const napa::Trace& t) {
  json j;
  j["framework"] = napa::hash_hex(fw.content_hash());
  j["initial"] = state_json(fw, napa::initial_state(fw));
  j["steps"] = json::array();
  for (const auto& step : t.steps) {
    json s;
    s["union"] = ids_json(fw, step.union_set);
    s["lambda"] = lambda_json(fw, step.lambda);
    s["state"] = state_json(fw, step.result);
    j["steps"].push_back(std::move(s));
  }
  return j;
}

void write_trace_file(const napa::Framework& fw, const napa::Trace& t,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << napa::trace_to_text(fw, t);
}

int cmd_validate(const Options& opt) {
  std::string text = read_file(opt.file);
  napa::ParseResult result = napa::parse(text);
  for (const auto& d : result.diagnostics)
    std::cerr << napa::format_diagnostic(opt.file, d) << "\n";
  if (opt.format == "json") {
    json j;
    j["valid"] = result.ok();
    j["diagnostics"] = json::array();
    for (const auto& d : result.diagnostics) {
      json dj;
      dj["line"] = d.span.line;
      dj["col"] = d.span.col;
      dj["message"] = d.message;
      j["diagnostics"].push_back(std::move(dj));
    }
    if (result.ok()) j["framework"] = napa::hash_hex(result.framework->content_hash());
    std::cout << j.dump(2) << "\n";
  } else if (result.ok()) {
    std::cout << "ok: " << result.framework->num_args() << " arguments, "
              << result.framework->agents().size() << " agents, "
              << result.framework->attacks().size() << " attacks, "
              << result.framework->persuasions().size() << " persuasions\n";
    std::cout << "framework " << napa::hash_hex(result.framework->content_hash()) << "\n";
  }
  return result.ok() ? kOk : kInvalidInput;
}

int cmd_semantics(const Options& opt) {
  napa::Framework fw = load_or_exit(opt);
  napa::State s = resolve_state(fw, opt);

  json out_json;
  if (opt.format == "json") {
    out_json["state"] = state_json(fw, s);
    out_json["agents"] = json::array();
  } else {
    std::cout << "state " << state_line(fw, s) << "\n";
  }
  for (const auto& agent : fw.agents()) {
    napa::ExtensionSet ext = napa::agent_extensions(fw, s, agent.id);
    if (ext.extensions.empty())
      std::cerr << "warning: agent " << agent.id << " has no acceptable set in this state\n";
    if (opt.format == "json") {
      json aj;
      aj["agent"] = agent.id;
      aj["semantics"] = napa::to_string(agent.sem);
      aj["extensions"] = json::array();
      for (const auto& e : ext.extensions) aj["extensions"].push_back(ids_json(fw, e));
      out_json["agents"].push_back(std::move(aj));
    } else {
      std::cout << "agent " << agent.id << " (" << napa::sem_long_name(agent.sem) << "): "
                << ext.extensions.size() << " extension(s)\n";
      for (const auto& e : ext.extensions)
        std::cout << "  " << napa::render_ids(fw, e) << "\n";
    }
  }
  if (opt.format == "json") std::cout << out_json.dump(2) << "\n";
  return kOk;
}

int cmd_successors(const Options& opt) {
  napa::Framework fw = load_or_exit(opt);
  napa::State s = resolve_state(fw, opt);
  napa::SuccessorList next = napa::successors(fw, s, opt.max_states);

  if (opt.format == "json") {
    json j;
    j["state"] = state_json(fw, s);
    j["truncated"] = next.truncated;
    j["transitions"] = json::array();
    for (const auto& e : next.edges) {
      json ej;
      ej["union"] = ids_json(fw, e.union_set);
      ej["lambda"] = lambda_json(fw, e.lambda);
      ej["to"] = state_json(fw, e.to);
      j["transitions"].push_back(std::move(ej));
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "state " << state_line(fw, s) << "\n";
    for (std::size_t i = 0; i < next.edges.size(); ++i) {
      const auto& e = next.edges[i];
      std::cout << "[" << (i + 1) << "] union " << napa::render_ids(fw, e.union_set)
                << "\n    lambda " << lambda_text(fw, e.lambda) << "\n    -> "
                << state_line(fw, e.to) << "\n";
    }
    std::cout << next.edges.size() << " transition(s)"
              << (next.truncated ? " (truncated)" : "") << "\n";
  }
  return kOk;
}

int cmd_explore(const Options& opt) {
  napa::Framework fw = load_or_exit(opt);

  if (!opt.query.empty()) {
    napa::QueryParse qp = napa::parse_query(fw, opt.query);
    if (!qp.query) {
      std::cerr << "query error: " << qp.error << "\n";
      return kInvalidInput;
    }
    napa::ReachResult r = napa::check_reachable(fw, *qp.query, opt.max_states);
    switch (r.kind) {
      case napa::ReachResult::Kind::witness: {
        if (!opt.trace_out.empty()) write_trace_file(fw, r.trace, opt.trace_out);
        if (opt.format == "json") {
          json j = trace_json(fw, r.trace);
          j["query"] = napa::query_to_string(fw, *qp.query);
          j["result"] = "witness";
          std::cout << j.dump(2) << "\n";
        } else {
          std::cout << "witness in " << r.trace.steps.size() << " step(s):\n"
                    << napa::trace_to_text(fw, r.trace);
        }
        return kOk;
      }
      case napa::ReachResult::Kind::not_found:
        if (opt.format == "json") {
          json j;
          j["result"] = "not-reachable";
          j["explored"] = r.explored;
          std::cout << j.dump(2) << "\n";
        } else {
          std::cout << "not reachable (explored " << r.explored << " states)\n";
        }
        return kNotReachable;
      case napa::ReachResult::Kind::inconclusive:
        if (opt.format == "json") {
          json j;
          j["result"] = "inconclusive";
          j["explored"] = r.explored;
          std::cout << j.dump(2) << "\n";
        } else {
          std::cout << "inconclusive: truncated after " << r.explored << " states\n";
        }
        return kInconclusive;
    }
    return kInternalError;
  }

  napa::StateGraph g = napa::explore(fw, opt.max_states);
  if (opt.format == "json") {
    json j;
    j["framework"] = napa::hash_hex(fw.content_hash());
    j["truncated"] = g.truncated;
    j["states"] = json::array();
    for (const auto& s : g.states) j["states"].push_back(state_json(fw, s));
    j["edges"] = json::array();
    for (const auto& e : g.edges) {
      json ej;
      ej["from"] = e.from;
      ej["to"] = e.to;
      ej["union"] = ids_json(fw, e.union_set);
      ej["lambda"] = lambda_json(fw, e.lambda);
      j["edges"].push_back(std::move(ej));
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << g.states.size() << " state(s), " << g.edges.size() << " edge(s)"
              << (g.truncated ? ", truncated" : "") << "\n";
    for (std::size_t i = 0; i < g.states.size(); ++i)
      std::cout << "s" << i << " " << state_line(fw, g.states[i]) << "\n";
    for (const auto& e : g.edges)
      std::cout << "s" << e.from << " -> s" << e.to << "  union "
                << napa::render_ids(fw, e.union_set) << "  lambda "
                << lambda_text(fw, e.lambda) << "\n";
  }
  return g.truncated ? kInconclusive : kOk;
}

int cmd_replay(const Options& opt) {
  napa::Framework fw = load_or_exit(opt);
  std::string text = read_file(opt.trace_file);
  napa::ReplayResult r = napa::replay(fw, text);
  if (opt.format == "json") {
    json j;
    j["verified"] = r.verified;
    if (!r.verified) {
      j["failed_step"] = r.failed_step;
      j["reason"] = r.reason;
    }
    std::cout << j.dump(2) << "\n";
  } else if (r.verified) {
    std::cout << "verified\n";
  } else {
    std::cout << "failed at step " << r.failed_step << ": " << r.reason << "\n";
  }
  return r.verified ? kOk : kInvalidInput;
}

int cmd_step(const Options& opt) {
  napa::Framework fw = load_or_exit(opt);
  napa::State cur = napa::initial_state(fw);
  napa::Trace trace;

  while (true) {
    std::cout << "state " << state_line(fw, cur) << "\n";
    for (const auto& agent : fw.agents()) {
      napa::ExtensionSet ext = napa::agent_extensions(fw, cur, agent.id);
      std::cout << "  " << agent.id << " (" << napa::sem_long_name(agent.sem) << "):";
      for (const auto& e : ext.extensions) std::cout << " " << napa::render_ids(fw, e);
      if (ext.extensions.empty()) std::cout << " (none)";
      std::cout << "\n";
    }
    napa::SuccessorList next = napa::successors(fw, cur, opt.max_states);
    if (next.edges.empty()) {
      std::cout << "no transitions from here\n";
      break;
    }
    for (std::size_t i = 0; i < next.edges.size(); ++i)
      std::cout << "[" << (i + 1) << "] union " << napa::render_ids(fw, next.edges[i].union_set)
                << " lambda " << lambda_text(fw, next.edges[i].lambda) << " -> "
                << napa::hash_hex(napa::state_hash(fw, next.edges[i].to)) << "\n";
    std::cout << "step> " << std::flush;

    std::string line;
    if (!std::getline(std::cin, line)) break;
    if (line.empty() || line == "q" || line == "quit") break;
    std::size_t choice = 0;
    try {
      choice = std::stoul(line);
    } catch (...) {
      std::cout << "enter an option number, or q to quit\n";
      continue;
    }
    if (choice < 1 || choice > next.edges.size()) {
      std::cout << "enter a number between 1 and " << next.edges.size() << "\n";
      continue;
    }
    const auto& e = next.edges[choice - 1];
    trace.steps.push_back({e.union_set, e.lambda, e.to});
    cur = e.to;
  }

  if (!opt.trace_out.empty()) {
    write_trace_file(fw, trace, opt.trace_out);
    std::cout << "trace (" << trace.steps.size() << " step(s)) written to " << opt.trace_out
              << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantified multi-agent negotiation engine"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool with_state) {
    cmd->add_option("file", opt.file, "scenario file (.napa)")->required();
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    cmd->add_option("--max-states", opt.max_states, "exploration cap")
        ->envname("NAPA_MAX_STATES")
        ->capture_default_str();
    if (with_state)
      cmd->add_option("--state", opt.state_hash,
                      "state hash (as printed by explore); default: initial state");
  };

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a scenario file");
  add_common(validate, false);

  CLI::App* semantics =
      app.add_subcommand("semantics", "per-agent acceptable sets in a state");
  add_common(semantics, true);

  CLI::App* successors = app.add_subcommand("successors", "legal transitions from a state");
  add_common(successors, true);

  CLI::App* explore = app.add_subcommand("explore", "reachable states, optionally with a query");
  add_common(explore, false);
  explore->add_option("--query", opt.query,
                      "conjunction of visible(a), !visible(a), qty(a) OP n");
  explore->add_option("--trace-out", opt.trace_out, "write the witness trace to a file");

  CLI::App* replay = app.add_subcommand("replay", "re-execute and verify a recorded trace");
  add_common(replay, false);
  replay->add_option("trace", opt.trace_file, "trace file")->required();

  CLI::App* step = app.add_subcommand("step", "interactively walk through a negotiation");
  add_common(step, false);
  step->add_option("--trace-out", opt.trace_out, "write the walked trace on exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (semantics->parsed()) return cmd_semantics(opt);
    if (successors->parsed()) return cmd_successors(opt);
    if (explore->parsed()) return cmd_explore(opt);
    if (replay->parsed()) return cmd_replay(opt);
    if (step->parsed()) return cmd_step(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}
