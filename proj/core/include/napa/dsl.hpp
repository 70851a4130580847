#pragma once

#include <optional>
#include <string>
#include <vector>

#include "napa/framework.hpp"

namespace napa {

struct Diagnostic {
  enum class Severity : std::uint8_t { error, warning };
  Severity severity = Severity::error;
  Span span;
  std::string message;
};

std::string format_diagnostic(const std::string& filename, const Diagnostic& d);

struct ParseResult {
  std::optional<Framework> framework;   // present iff no errors
  FrameworkDef def;                     // as written, even when invalid
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return framework.has_value(); }
};

/// Parses the scenario text format. Never throws on arbitrary byte input; all
/// lexical, syntactic and validation problems come back as diagnostics with
/// source spans. On success the framework passed validation.
ParseResult parse(const std::string& text);

/// Canonical text form: agents, args, init, qty, attacks, induces, converts,
/// handshakes, each block sorted. parse(serialize(fw)) is structurally equal
/// to fw, and serialize is idempotent across one round trip.
std::string serialize(const Framework& fw);

}  // namespace napa
