#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace napa {

using ArgIndex = std::uint32_t;
using TripleIndex = std::uint32_t;
using Quantity = std::uint64_t;

/// Acceptability criterion an agent applies within its scope.
enum class Sem : std::uint8_t { complete, preferred, grounded };

std::string to_string(Sem s);                 // "co" / "pr" / "gr"
std::string sem_long_name(Sem s);             // "complete" / ...
std::optional<Sem> sem_from_string(const std::string& s);

/// Source location, 1-based. line == 0 means "unknown".
struct Span {
  std::uint32_t line = 0;
  std::uint32_t col = 0;
  std::uint32_t end_line = 0;
  std::uint32_t end_col = 0;
  bool known() const { return line != 0; }
};

// ---------------------------------------------------------------------------
// Symbolic layer: a candidate tuple as written down (possibly ill-formed).
// ---------------------------------------------------------------------------

/// Persuasion triple in symbolic form; no middle means an inducement.
struct TripleRef {
  std::string source;
  std::optional<std::string> middle;
  std::string target;

  bool is_conversion() const { return middle.has_value(); }
  friend bool operator==(const TripleRef&, const TripleRef&) = default;
  friend auto operator<=>(const TripleRef&, const TripleRef&) = default;
};

std::string to_string(const TripleRef& t);    // "(src,mid,tgt)" with `eps` middle

/// One term of a constraint comparison: a literal, $arg, or $(triple).
struct TermDef {
  enum class Kind : std::uint8_t { literal, arg_ref, triple_ref };
  Kind kind = Kind::literal;
  Quantity value = 0;        // literal
  std::string arg;           // arg_ref
  TripleRef triple;          // triple_ref

  static TermDef lit(Quantity n) { return {Kind::literal, n, {}, {}}; }
  static TermDef of_arg(std::string a) { return {Kind::arg_ref, 0, std::move(a), {}}; }
  static TermDef of_triple(TripleRef t) { return {Kind::triple_ref, 0, {}, std::move(t)}; }

  friend bool operator==(const TermDef&, const TermDef&) = default;
  friend auto operator<=>(const TermDef&, const TermDef&) = default;
};

enum class CmpOp : std::uint8_t { less, equal };

struct ComparisonDef {
  TermDef lhs;
  CmpOp op = CmpOp::less;
  TermDef rhs;
  friend bool operator==(const ComparisonDef&, const ComparisonDef&) = default;
  friend auto operator<=>(const ComparisonDef&, const ComparisonDef&) = default;
};

/// Finite conjunction of comparisons; empty means trivially satisfied.
using ConstraintDef = std::vector<ComparisonDef>;

/// Candidate framework tuple. Fields mirror what a scenario file states; this
/// is what validate() inspects and what Framework::compile() consumes.
struct FrameworkDef {
  struct Arg {
    std::string id;
    std::string label;
    Span span;
  };
  struct Agent {
    std::string id;
    Sem sem = Sem::preferred;
    std::vector<std::string> scope;
    Span span;
  };
  struct Attack {
    std::string source;
    std::string target;
    ConstraintDef when;
    Span span;
  };
  struct Persuasion {
    TripleRef triple;
    ConstraintDef when;
    std::optional<TermDef> amount;   // only literal / arg_ref are legal
    Span span;
  };
  struct QuantityEntry {
    std::string arg;
    Quantity value = 0;
    Span span;
  };
  struct Handshake {
    TripleRef a;
    TripleRef b;
    Span span;
  };

  std::vector<Arg> arguments;
  std::vector<Agent> agents;
  std::vector<std::string> initial_visible;
  Span initial_visible_span;
  std::vector<QuantityEntry> quantities;
  std::vector<Attack> attacks;
  std::vector<Persuasion> persuasions;
  std::vector<Handshake> handshakes;   // symmetrized on compile
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string rule;      // stable code, e.g. "handshake-symmetric"
  std::string subject;   // offending element in display form
  std::string message;
  Span span;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every well-formedness restriction of the tuple. Violations are data;
/// this never throws on bad input.
ValidationReport validate(const FrameworkDef& def);

/// Thrown by Framework::compile on a candidate that fails validation.
class InvalidFramework : public std::runtime_error {
 public:
  explicit InvalidFramework(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// ---------------------------------------------------------------------------
// Resolved, immutable framework
// ---------------------------------------------------------------------------

/// Resolved constraint term: literal value, argument index, or triple index.
struct Term {
  enum class Kind : std::uint8_t { literal, arg_ref, triple_ref };
  Kind kind = Kind::literal;
  Quantity value = 0;
  std::uint32_t ref = 0;   // arg or triple index
  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Comparison {
  Term lhs;
  CmpOp op = CmpOp::less;
  Term rhs;
  friend bool operator==(const Comparison&, const Comparison&) = default;
  friend auto operator<=>(const Comparison&, const Comparison&) = default;
};

/// Canonical (sorted, deduplicated) conjunction.
using Constraint = std::vector<Comparison>;

/// Resolved persuasion triple; middle absent means inducement.
struct Triple {
  ArgIndex source = 0;
  std::optional<ArgIndex> middle;
  ArgIndex target = 0;
  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Quantity map: sorted by argument index; its domain is exactly the resource
/// arguments and never changes across transitions (type rigidity).
using QuantityMap = std::vector<std::pair<ArgIndex, Quantity>>;

std::optional<Quantity> quantity_of(const QuantityMap& q, ArgIndex a);

enum class ArgKind : std::uint8_t { resource, ordinary };

/// A negotiation state: the visible arguments plus the current quantities.
struct State {
  std::vector<ArgIndex> visible;   // sorted
  QuantityMap quantities;          // sorted by argument

  bool is_visible(ArgIndex a) const;
  friend bool operator==(const State&, const State&) = default;
};

struct StateHasher {
  std::size_t operator()(const State& s) const;
};

class Framework {
 public:
  /// Resolves and freezes a validated candidate. Throws InvalidFramework when
  /// validate(def) is nonempty.
  static Framework compile(const FrameworkDef& def);

  // Arguments (sorted by id; indices are the canonical order).
  std::size_t num_args() const { return arg_ids_.size(); }
  const std::string& arg_id(ArgIndex i) const { return arg_ids_[i]; }
  const std::string& arg_label(ArgIndex i) const { return arg_labels_[i]; }
  std::optional<ArgIndex> find_arg(const std::string& id) const;
  ArgIndex arg(const std::string& id) const;   // throws on unknown id
  bool is_resource(ArgIndex i) const { return is_resource_[i]; }

  // Agents (sorted by id).
  struct AgentInfo {
    std::string id;
    Sem sem = Sem::preferred;
    std::vector<ArgIndex> scope;   // sorted
  };
  const std::vector<AgentInfo>& agents() const { return agents_; }
  const AgentInfo& agent(const std::string& id) const;   // throws on unknown

  // Attack relation (sorted by (source, target)).
  struct AttackInfo {
    ArgIndex source = 0;
    ArgIndex target = 0;
    Constraint when;
  };
  const std::vector<AttackInfo>& attacks() const { return attacks_; }

  // Persuasion relation (canonically sorted).
  const std::vector<Triple>& persuasions() const { return persuasions_; }
  const Constraint& persuasion_when(TripleIndex i) const { return persuasion_when_[i]; }
  const std::optional<Term>& amount(TripleIndex i) const { return amounts_[i]; }
  const std::vector<TripleIndex>& handshake(TripleIndex i) const { return handshake_[i]; }
  std::optional<TripleIndex> find_triple(const Triple& t) const;
  TripleIndex triple_index(const std::string& source,
                           const std::optional<std::string>& middle,
                           const std::string& target) const;   // throws on unknown
  std::string triple_text(TripleIndex i) const;
  std::string triple_text(const Triple& t) const;

  const std::vector<ArgIndex>& initial_visible() const { return initial_visible_; }
  const QuantityMap& initial_quantities() const { return initial_quantities_; }

  // Term builders for tests and tooling (resolve by name, throw on unknown).
  Term term_literal(Quantity n) const;
  Term term_arg(const std::string& id) const;
  Term term_triple(const std::string& source, const std::optional<std::string>& middle,
                   const std::string& target) const;

  /// 64-bit content hash of the canonical text form.
  std::uint64_t content_hash() const { return content_hash_; }

  friend bool operator==(const Framework& a, const Framework& b);

 private:
  Framework() = default;

  std::vector<std::string> arg_ids_;
  std::vector<std::string> arg_labels_;
  std::vector<bool> is_resource_;
  std::vector<AgentInfo> agents_;
  std::vector<ArgIndex> initial_visible_;
  QuantityMap initial_quantities_;
  std::vector<AttackInfo> attacks_;
  std::vector<Triple> persuasions_;
  std::vector<Constraint> persuasion_when_;
  std::vector<std::optional<Term>> amounts_;
  std::vector<std::vector<TripleIndex>> handshake_;
  std::uint64_t content_hash_ = 0;
};

/// The initial state (A_init with the initial quantities).
State initial_state(const Framework& fw);

/// Resource iff the initial quantity map is defined at the argument; the
/// classification is state-independent. Throws on unknown id.
ArgKind classify_argument(const Framework& fw, const std::string& id);
ArgKind classify_argument(const Framework& fw, ArgIndex a);

/// Checked 64-bit arithmetic; overflow is a hard error, never wraparound.
Quantity checked_add(Quantity a, Quantity b);

std::string render_ids(const Framework& fw, const std::vector<ArgIndex>& ids);
std::uint64_t state_hash(const Framework& fw, const State& s);
std::string state_key(const Framework& fw, const State& s);   // canonical text

}  // namespace napa
