#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "napa/dsl.hpp"

#ifndef NAPA_SCENARIO_DIR
#error "NAPA_SCENARIO_DIR must be defined by the build"
#endif

namespace fixtures {

inline std::string read_scenario(const std::string& name) {
  const std::string path = std::string(NAPA_SCENARIO_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline napa::ParseResult parse_scenario(const std::string& name) {
  napa::ParseResult r = napa::parse(read_scenario(name));
  if (!r.ok()) {
    std::string msg = "scenario " + name + " failed to parse:";
    for (const auto& d : r.diagnostics) msg += "\n  " + napa::format_diagnostic(name, d);
    throw std::runtime_error(msg);
  }
  return r;
}

inline napa::Framework market() {
  return std::move(*parse_scenario("console_market.napa").framework);
}

inline napa::Framework market_relaxed() {
  return std::move(*parse_scenario("console_market_relaxed.napa").framework);
}

inline napa::FrameworkDef market_def() {
  return parse_scenario("console_market.napa").def;
}

}  // namespace fixtures
