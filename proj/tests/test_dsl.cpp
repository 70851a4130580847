#include <doctest.h>

#include <algorithm>
#include <random>

#include "napa/dsl.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace napa;

namespace {

bool mentions(const std::vector<Diagnostic>& diags, const std::string& needle) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
    return d.message.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("parsing the bundled scenario") {
  ParseResult r = parse(fixtures::read_scenario("console_market.napa"));
  REQUIRE(r.ok());
  const Framework& fw = *r.framework;
  CHECK(fw.num_args() == 16);
  CHECK(fw.agents().size() == 3);
  CHECK(fw.attacks().size() == 5);
  CHECK(fw.persuasions().size() == 11);
  CHECK(fw.arg_label(fw.arg("a9")) == "e2 has dollars");
  CHECK(fw.agent("e2").sem == Sem::preferred);

  // Handshakes arrive symmetric: (a10,a5,a11) pairs with both reseller offers.
  auto hs = fw.handshake(fw.triple_index("a10", std::string("a5"), "a11"));
  REQUIRE(hs.size() == 2);
  CHECK(fw.triple_text(hs[0]) == "(a2,a9,a4)");
  CHECK(fw.triple_text(hs[1]) == "(a3,a9,a4)");
  for (TripleIndex i = 0; i < fw.persuasions().size(); ++i)
    for (TripleIndex j : fw.handshake(i)) {
      const auto& back = fw.handshake(j);
      CHECK(std::binary_search(back.begin(), back.end(), i));
    }
}

TEST_CASE("parse diagnostics carry positions") {
  SUBCASE("empty input has no arguments") {
    ParseResult r = parse("");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "argument set must not be empty"));
    for (const auto& d : r.diagnostics) CHECK(d.span.known());
  }

  SUBCASE("unknown reference") {
    ParseResult r = parse("arg x\ninit { y }\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "unknown argument 'y'"));
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics[0].span.line == 2);
  }

  SUBCASE("amount on an ordinary middle") {
    std::string text = fixtures::read_scenario("console_market.napa");
    const std::string from = "convert a7 : a2 => a3";
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), "convert a7 : a2 => a3 amount 5");
    ParseResult r = parse(text);
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "amount-middle-ordinary"));
  }

  SUBCASE("syntax error with recovery") {
    // The target of the attack is missing; the error points at the token the
    // parser found instead, and the following statements still parse.
    ParseResult r = parse("arg x\nattack x -> \nqty x = 2\ninit { x }\n");
    CHECK_FALSE(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].span.line == 3);
    CHECK(r.def.quantities.size() == 1);
    CHECK(r.def.initial_visible == std::vector<std::string>{"x"});
  }

  SUBCASE("reserved words cannot name arguments") {
    ParseResult r = parse("arg when\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "reserved word"));
  }

  SUBCASE("unterminated string") {
    ParseResult r = parse("arg x \"oops\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "unterminated string"));
  }

  SUBCASE("oversized number") {
    ParseResult r = parse("arg x\nqty x = 99999999999999999999999\ninit { x }\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "64 bits"));
  }

  SUBCASE("duplicate quantity") {
    ParseResult r = parse("arg x\nqty x = 1\nqty x = 2\ninit { x }\n");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "qty-duplicate"));
  }
}

TEST_CASE("line endings and statement layout") {
  SUBCASE("CRLF input parses like LF input") {
    std::string lf = fixtures::read_scenario("console_market.napa");
    std::string crlf;
    for (char c : lf) {
      if (c == '\n') crlf += '\r';
      crlf += c;
    }
    ParseResult a = parse(lf);
    ParseResult b = parse(crlf);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(*a.framework == *b.framework);
  }

  SUBCASE("multiple init statements accumulate") {
    ParseResult r = parse("arg x\narg y\ninit { x }\ninit { y }\n");
    REQUIRE(r.ok());
    CHECK(r.framework->initial_visible().size() == 2);
  }

  SUBCASE("the serializer emits LF only") {
    Framework fw = fixtures::market();
    CHECK(serialize(fw).find('\r') == std::string::npos);
  }
}

TEST_CASE("serialization round trip") {
  SUBCASE("the bundled scenario survives") {
    Framework fw = fixtures::market();
    std::string text = serialize(fw);
    ParseResult r = parse(text);
    REQUIRE(r.ok());
    CHECK(*r.framework == fw);
    CHECK(serialize(*r.framework) == text);   // idempotent after one pass
  }

  SUBCASE("no when clause is emitted for empty guards") {
    ParseResult r = parse("arg x\narg y\ninit { x y }\nattack x -> y\n");
    REQUIRE(r.ok());
    CHECK(serialize(*r.framework).find("when") == std::string::npos);
  }

  SUBCASE("labels with quotes and backslashes survive") {
    FrameworkDef def;
    def.arguments = {{"x", "say \"hi\" \\ there", {}}};
    def.agents = {{"e", Sem::complete, {"x"}, {}}};
    Framework fw = Framework::compile(def);
    ParseResult r = parse(serialize(fw));
    REQUIRE(r.ok());
    CHECK(r.framework->arg_label(r.framework->arg("x")) == "say \"hi\" \\ there");
  }

  SUBCASE("random frameworks survive") {
    std::mt19937 rng(1234);
    gen::GenOptions opt;
    opt.with_labels = true;
    for (int round = 0; round < 300; ++round) {
      FrameworkDef def = gen::random_def(rng, opt);
      Framework fw = Framework::compile(def);
      std::string text = serialize(fw);
      ParseResult r = parse(text);
      REQUIRE_MESSAGE(r.ok(), text);
      CHECK(*r.framework == fw);
      CHECK(serialize(*r.framework) == text);
    }
  }
}

TEST_CASE("the parser survives hostile input") {
  std::mt19937 rng(555);
  const std::string seed_text = fixtures::read_scenario("console_market.napa");
  const char alphabet[] = "ax19 =$<>(){}[]~:,#\"\\\n\t->=>eps when amount \xff\xc0\x01";

  for (int round = 0; round < 3000; ++round) {
    std::string input;
    if (round % 3 == 0) {
      // Mutated slices of a real scenario.
      std::size_t a = rng() % seed_text.size();
      std::size_t b = a + rng() % std::min<std::size_t>(200, seed_text.size() - a);
      input = seed_text.substr(a, b - a);
      for (int k = 0; k < 8 && !input.empty(); ++k)
        input[rng() % input.size()] = alphabet[rng() % (sizeof(alphabet) - 1)];
    } else {
      std::size_t len = rng() % 160;
      for (std::size_t k = 0; k < len; ++k)
        input += alphabet[rng() % (sizeof(alphabet) - 1)];
    }
    ParseResult r = parse(input);   // must not crash or hang
    if (r.ok()) CHECK(validate(r.def).ok());
  }
}
