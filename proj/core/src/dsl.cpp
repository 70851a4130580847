#include "napa/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace napa {

std::string format_diagnostic(const std::string& filename, const Diagnostic& d) {
  std::ostringstream out;
  out << filename;
  if (d.span.known()) out << ":" << d.span.line << ":" << d.span.col;
  out << ": " << (d.severity == Diagnostic::Severity::error ? "error" : "warning") << ": "
      << d.message;
  return out.str();
}

namespace {

enum class Tok : std::uint8_t {
  word,      // identifier or keyword
  number,
  string,
  lbrace, rbrace, lparen, rparen, lbracket, rbracket,
  comma, tilde, colon, dollar, lt,
  arrow,     // ->
  fat_arrow, // =>
  equals,    // =
  eq_eq,     // ==
  eof,
  bad,
};

struct Token {
  Tok kind = Tok::eof;
  std::string text;      // word spelling / string contents
  Quantity number = 0;
  Span span;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {"agent", "arg", "init", "qty",   "attack",
                                           "induce", "convert", "handshake", "when",
                                           "amount", "semantics", "eps", "co", "pr", "gr"};
  return kw;
}

const std::set<std::string>& statement_keywords() {
  static const std::set<std::string> kw = {"agent", "arg",     "init",   "qty",
                                           "attack", "induce", "convert", "handshake"};
  return kw;
}

class Lexer {
 public:
  Lexer(const std::string& text, std::vector<Diagnostic>& diags)
      : text_(text), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      Token t = next();
      bool at_end = t.kind == Tok::eof;
      if (t.kind != Tok::bad) out.push_back(std::move(t));
      if (at_end) break;
    }
    return out;
  }

 private:
  char peek(std::size_t off = 0) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  Span here() const { return {line_, col_, line_, col_}; }

  void error(const Span& span, std::string msg) {
    diags_.push_back({Diagnostic::Severity::error, span, std::move(msg)});
  }

  Token next() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
    Token t;
    t.span = here();
    if (pos_ >= text_.size()) {
      t.kind = Tok::eof;
      return t;
    }

    char c = advance();
    auto close = [&](Tok kind) {
      t.kind = kind;
      t.span.end_line = line_;
      t.span.end_col = col_;
      return t;
    };

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word(1, c);
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
        word += advance();
      t.text = std::move(word);
      return close(Tok::word);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num(1, c);
      while (std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
      Quantity v = 0;
      auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc() || p != num.data() + num.size()) {
        error(t.span, "number '" + num + "' does not fit in 64 bits");
        t.kind = Tok::bad;
        t.span.end_line = line_;
        t.span.end_col = col_;
        return t;
      }
      t.number = v;
      return close(Tok::number);
    }
    switch (c) {
      case '{': return close(Tok::lbrace);
      case '}': return close(Tok::rbrace);
      case '(': return close(Tok::lparen);
      case ')': return close(Tok::rparen);
      case '[': return close(Tok::lbracket);
      case ']': return close(Tok::rbracket);
      case ',': return close(Tok::comma);
      case '~': return close(Tok::tilde);
      case ':': return close(Tok::colon);
      case '$': return close(Tok::dollar);
      case '<': return close(Tok::lt);
      case '-':
        if (peek() == '>') {
          advance();
          return close(Tok::arrow);
        }
        error(t.span, "stray '-' (did you mean '->'?)");
        t.kind = Tok::bad;
        return t;
      case '=':
        if (peek() == '>') {
          advance();
          return close(Tok::fat_arrow);
        }
        if (peek() == '=') {
          advance();
          return close(Tok::eq_eq);
        }
        return close(Tok::equals);
      case '"': {
        std::string s;
        while (pos_ < text_.size()) {
          char d = advance();
          if (d == '"') return t.text = std::move(s), close(Tok::string);
          if (d == '\n') break;
          if (d == '\\') {
            if (pos_ >= text_.size()) break;
            char e = advance();
            if (e == '"' || e == '\\') s += e;
            else {
              s += '\\';
              s += e;
            }
          } else {
            s += d;
          }
        }
        error(t.span, "unterminated string");
        t.kind = Tok::bad;
        return t;
      }
      default:
        error(t.span, std::string("unexpected character '") +
                          (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c)
                                                                       : std::string("?")) +
                          "'");
        t.kind = Tok::bad;
        return t;
    }
  }

  const std::string& text_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  FrameworkDef run() {
    while (!at(Tok::eof)) statement();
    return std::move(def_);
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::word) && cur().text == w; }
  Token take() { return toks_[i_++]; }

  void error(std::string msg) {
    diags_.push_back({Diagnostic::Severity::error, cur().span, std::move(msg)});
  }

  void sync() {
    while (!at(Tok::eof) && !(at(Tok::word) && statement_keywords().count(cur().text))) take();
  }

  bool expect(Tok k, const char* what) {
    if (at(k)) {
      take();
      return true;
    }
    error(std::string("expected ") + what);
    sync();
    return false;
  }

  std::optional<std::string> expect_id(const char* what) {
    if (at(Tok::word) && !keywords().count(cur().text)) return take().text;
    if (at(Tok::word))
      error("'" + cur().text + "' is a reserved word and cannot be used as " + what);
    else
      error(std::string("expected ") + what);
    sync();
    return std::nullopt;
  }

  // triple := ( ID , (ID|eps) , ID )
  std::optional<TripleRef> triple() {
    if (!expect(Tok::lparen, "'('")) return std::nullopt;
    auto src = expect_id("an argument id");
    if (!src) return std::nullopt;
    if (!expect(Tok::comma, "','")) return std::nullopt;
    std::optional<std::string> mid;
    if (at_word("eps")) {
      take();
    } else {
      auto m = expect_id("an argument id or 'eps'");
      if (!m) return std::nullopt;
      mid = *m;
    }
    if (!expect(Tok::comma, "','")) return std::nullopt;
    auto tgt = expect_id("an argument id");
    if (!tgt) return std::nullopt;
    if (!expect(Tok::rparen, "')'")) return std::nullopt;
    return TripleRef{*src, mid, *tgt};
  }

  // term := NAT | $ ID | $ ( ID , (ID|eps) , ID )
  std::optional<TermDef> term() {
    if (at(Tok::number)) return TermDef::lit(take().number);
    if (at(Tok::dollar)) {
      take();
      if (at(Tok::lparen)) {
        auto t = triple();
        if (!t) return std::nullopt;
        return TermDef::of_triple(*t);
      }
      auto id = expect_id("an argument id");
      if (!id) return std::nullopt;
      return TermDef::of_arg(*id);
    }
    error("expected a number, $argument or $(persuasion)");
    sync();
    return std::nullopt;
  }

  // when := when [ cmp (, cmp)* ]
  std::optional<ConstraintDef> opt_when() {
    ConstraintDef out;
    if (!at_word("when")) return out;
    take();
    if (!expect(Tok::lbracket, "'['")) return std::nullopt;
    while (true) {
      auto lhs = term();
      if (!lhs) return std::nullopt;
      CmpOp op;
      if (at(Tok::lt)) {
        take();
        op = CmpOp::less;
      } else if (at(Tok::eq_eq)) {
        take();
        op = CmpOp::equal;
      } else {
        error("expected '<' or '=='");
        sync();
        return std::nullopt;
      }
      auto rhs = term();
      if (!rhs) return std::nullopt;
      out.push_back({*lhs, op, *rhs});
      if (at(Tok::comma)) {
        take();
        continue;
      }
      break;
    }
    if (!expect(Tok::rbracket, "']'")) return std::nullopt;
    return out;
  }

  void statement() {
    if (!at(Tok::word)) {
      error("expected a statement");
      take();
      sync();
      return;
    }
    const Token head = cur();
    if (head.text == "agent") {
      take();
      FrameworkDef::Agent ag;
      ag.span = head.span;
      auto id = expect_id("an agent id");
      if (!id) return;
      ag.id = *id;
      if (!at_word("semantics")) {
        error("expected 'semantics'");
        sync();
        return;
      }
      take();
      if (at(Tok::word)) {
        auto sem = sem_from_string(cur().text);
        if (!sem) {
          error("expected one of 'co', 'pr', 'gr'");
          sync();
          return;
        }
        ag.sem = *sem;
        take();
      } else {
        error("expected one of 'co', 'pr', 'gr'");
        sync();
        return;
      }
      if (!expect(Tok::lbrace, "'{'")) return;
      while (!at(Tok::rbrace)) {
        auto a = expect_id("an argument id");
        if (!a) return;
        ag.scope.push_back(*a);
      }
      take();
      if (ag.scope.empty()) {
        diags_.push_back({Diagnostic::Severity::error, head.span,
                          "agent '" + ag.id + "' must name at least one argument"});
      }
      def_.agents.push_back(std::move(ag));
    } else if (head.text == "arg") {
      take();
      FrameworkDef::Arg a;
      a.span = head.span;
      auto id = expect_id("an argument id");
      if (!id) return;
      a.id = *id;
      if (at(Tok::string)) a.label = take().text;
      def_.arguments.push_back(std::move(a));
    } else if (head.text == "init") {
      take();
      if (!def_.initial_visible_span.known()) def_.initial_visible_span = head.span;
      if (!expect(Tok::lbrace, "'{'")) return;
      while (!at(Tok::rbrace)) {
        auto a = expect_id("an argument id");
        if (!a) return;
        def_.initial_visible.push_back(*a);
      }
      take();
    } else if (head.text == "qty") {
      take();
      FrameworkDef::QuantityEntry q;
      q.span = head.span;
      auto id = expect_id("an argument id");
      if (!id) return;
      q.arg = *id;
      if (!expect(Tok::equals, "'='")) return;
      if (!at(Tok::number)) {
        error("expected a number");
        sync();
        return;
      }
      q.value = take().number;
      def_.quantities.push_back(std::move(q));
    } else if (head.text == "attack") {
      take();
      FrameworkDef::Attack at_stmt;
      at_stmt.span = head.span;
      auto src = expect_id("an argument id");
      if (!src) return;
      at_stmt.source = *src;
      if (!expect(Tok::arrow, "'->'")) return;
      auto tgt = expect_id("an argument id");
      if (!tgt) return;
      at_stmt.target = *tgt;
      auto when = opt_when();
      if (!when) return;
      at_stmt.when = std::move(*when);
      def_.attacks.push_back(std::move(at_stmt));
    } else if (head.text == "induce") {
      take();
      FrameworkDef::Persuasion p;
      p.span = head.span;
      auto src = expect_id("an argument id");
      if (!src) return;
      if (!expect(Tok::fat_arrow, "'=>'")) return;
      auto tgt = expect_id("an argument id");
      if (!tgt) return;
      p.triple = TripleRef{*src, std::nullopt, *tgt};
      auto when = opt_when();
      if (!when) return;
      p.when = std::move(*when);
      def_.persuasions.push_back(std::move(p));
    } else if (head.text == "convert") {
      take();
      FrameworkDef::Persuasion p;
      p.span = head.span;
      auto src = expect_id("an argument id");
      if (!src) return;
      if (!expect(Tok::colon, "':'")) return;
      auto mid = expect_id("an argument id");
      if (!mid) return;
      if (!expect(Tok::fat_arrow, "'=>'")) return;
      auto tgt = expect_id("an argument id");
      if (!tgt) return;
      p.triple = TripleRef{*src, *mid, *tgt};
      if (at_word("amount")) {
        take();
        auto amt = term();
        if (!amt) return;
        p.amount = std::move(*amt);
      }
      auto when = opt_when();
      if (!when) return;
      p.when = std::move(*when);
      def_.persuasions.push_back(std::move(p));
    } else if (head.text == "handshake") {
      take();
      FrameworkDef::Handshake h;
      h.span = head.span;
      auto a = triple();
      if (!a) return;
      if (!expect(Tok::tilde, "'~'")) return;
      auto b = triple();
      if (!b) return;
      h.a = std::move(*a);
      h.b = std::move(*b);
      // Statements are symmetrized automatically.
      FrameworkDef::Handshake back{h.b, h.a, h.span};
      def_.handshakes.push_back(std::move(h));
      def_.handshakes.push_back(std::move(back));
    } else {
      error("unknown statement '" + head.text + "'");
      take();
      sync();
    }
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  FrameworkDef def_;
  std::size_t i_ = 0;
};

}  // namespace

ParseResult parse(const std::string& text) {
  ParseResult result;
  Lexer lexer(text, result.diagnostics);
  Parser parser(lexer.run(), result.diagnostics);
  result.def = parser.run();
  if (!result.diagnostics.empty()) return result;

  ValidationReport report = validate(result.def);
  if (!report.ok()) {
    for (const auto& v : report.violations) {
      Span span = v.span.known() ? v.span : Span{1, 1, 1, 1};
      result.diagnostics.push_back(
          {Diagnostic::Severity::error, span, v.rule + ": " + v.message});
    }
    return result;
  }
  result.framework = Framework::compile(result.def);
  return result;
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += "\"";
  return out;
}

std::string term_text(const Framework& fw, const Term& t) {
  switch (t.kind) {
    case Term::Kind::literal:
      return std::to_string(t.value);
    case Term::Kind::arg_ref:
      return "$" + fw.arg_id(t.ref);
    case Term::Kind::triple_ref:
      return "$" + fw.triple_text(static_cast<TripleIndex>(t.ref));
  }
  return "?";
}

std::string when_text(const Framework& fw, const Constraint& c) {
  if (c.empty()) return "";
  std::string out = " when [";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ", ";
    out += term_text(fw, c[i].lhs);
    out += c[i].op == CmpOp::less ? " < " : " == ";
    out += term_text(fw, c[i].rhs);
  }
  out += "]";
  return out;
}

}  // namespace

std::string serialize(const Framework& fw) {
  std::ostringstream out;

  for (const auto& ag : fw.agents()) {
    out << "agent " << ag.id << " semantics " << to_string(ag.sem) << " {";
    for (ArgIndex a : ag.scope) out << " " << fw.arg_id(a);
    out << " }\n";
  }

  for (ArgIndex a = 0; a < fw.num_args(); ++a) {
    out << "arg " << fw.arg_id(a);
    if (!fw.arg_label(a).empty()) out << " " << quote(fw.arg_label(a));
    out << "\n";
  }

  out << "init {";
  for (ArgIndex a : fw.initial_visible()) out << " " << fw.arg_id(a);
  out << " }\n";

  for (const auto& [a, n] : fw.initial_quantities())
    out << "qty " << fw.arg_id(a) << " = " << n << "\n";

  for (const auto& at : fw.attacks())
    out << "attack " << fw.arg_id(at.source) << " -> " << fw.arg_id(at.target)
        << when_text(fw, at.when) << "\n";

  const auto& triples = fw.persuasions();
  for (TripleIndex i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (t.middle) continue;
    out << "induce " << fw.arg_id(t.source) << " => " << fw.arg_id(t.target)
        << when_text(fw, fw.persuasion_when(i)) << "\n";
  }
  for (TripleIndex i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    if (!t.middle) continue;
    out << "convert " << fw.arg_id(t.source) << " : " << fw.arg_id(*t.middle) << " => "
        << fw.arg_id(t.target);
    if (fw.amount(i)) out << " amount " << term_text(fw, *fw.amount(i));
    out << when_text(fw, fw.persuasion_when(i)) << "\n";
  }

  std::vector<std::pair<TripleIndex, TripleIndex>> pairs;
  for (TripleIndex i = 0; i < triples.size(); ++i)
    for (TripleIndex j : fw.handshake(i))
      if (i < j) pairs.emplace_back(i, j);
  std::sort(pairs.begin(), pairs.end());
  for (auto [i, j] : pairs)
    out << "handshake " << fw.triple_text(i) << " ~ " << fw.triple_text(j) << "\n";

  return out.str();
}

}  // namespace napa
