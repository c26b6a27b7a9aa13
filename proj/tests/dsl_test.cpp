#include <gtest/gtest.h>

#include "cwb/dsl.hpp"
#include "support/generators.hpp"

using namespace cwb;

TEST(ParseProgram, SingleProjection) {
  const auto p = parse_program("def f = proj 2 3\n");
  ASSERT_EQ(p.defs.size(), 1u);
  EXPECT_EQ(p.defs[0].name, "f");
  EXPECT_EQ(arity(p.function("f")), 3u);
}

TEST(ParseProgram, ArityErrorNamesTheTerm) {
  try {
    parse_program("def ok = zero\ndef f = compose succ ((proj 4 3))\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 24u);
    EXPECT_NE(e.message().find("proj 4 3"), std::string::npos) << e.what();
    EXPECT_NE(e.message().find("'f'"), std::string::npos) << e.what();
  }
}

TEST(ParseProgram, ReferencesAreInlined) {
  const auto p = parse_program(R"(format=1
# addition and a use of it declared before it
def double = compose add ((proj 1 1) (proj 1 1))
def add = primrec (proj 1 1) (compose succ ((proj 3 3)))
)");
  EXPECT_TRUE(same(p.function("add"), lib::add()));
  EXPECT_TRUE(same(p.function("double"), compose(lib::add(), {proj(1, 1), proj(1, 1)})));
}

TEST(ParseProgram, UnparenthesisedPrefixFormsParse) {
  const auto p = parse_program("def add = primrec proj 1 1 compose succ (proj 3 3)\n");
  EXPECT_TRUE(same(p.function("add"), lib::add()));
}

TEST(ParseProgram, Diagnostics) {
  auto fails_at = [](std::string_view text, std::size_t line, std::string_view needle) {
    try {
      parse_program(text);
      ADD_FAILURE() << "parsed: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  fails_at("def f = g\n", 1, "unknown name 'g'");
  fails_at("def f = zero\ndef f = succ\n", 2, "duplicate definition");
  fails_at("def f = g\ndef g = f\n", 1, "cycle");
  fails_at("def f = proj 1\n", 1, "projection arity");
  fails_at("def f = zero zero\n", 1, "unexpected 'zero'");
  fails_at("\n\ndef f = $\n", 3, "unexpected character");
  fails_at("def zero = succ\n", 1, "keyword");
  fails_at("format=2\n", 1, "unsupported format");
  fails_at("machine m\nstates=1 alphabet=1\n", 1, "no 'end'");
  fails_at("machine m\nstates=1 alphabet=1\n0 0 -> 0 X 0\nend\n", 3, "move must be L or R");
  fails_at("machine m\nstates=1 alphabet=1\n0 0 -> 0 L 1\nend\n", 3, "out of range");
  fails_at("def f = proj 99999999999 1\n", 1, "out of range");
  fails_at("def f = compose succ (zero\n", 1, "unterminated");
}

TEST(ParseMachine, HeaderAndTwoTransitions) {
  const auto m = parse_machine(R"(# ping-pong
states=2 alphabet=1 start=0
0 0 -> 0 R 1
1 0 -> 0 L 0
)");
  EXPECT_EQ(m.transition_count(), 2u);
  EXPECT_EQ(m, machines::ping_pong());
}

TEST(ParseMachine, RejectsDuplicateTransition) {
  EXPECT_THROW(parse_machine("states=1 alphabet=2\n0 0 -> 1 R 0\n0 0 -> 1 L 0\n"), ParseError);
  EXPECT_THROW(parse_machine(""), ParseError);
  EXPECT_THROW(parse_machine("alphabet=2\n"), ParseError);
}

TEST(FormatProgram, EmptyProgramRoundTrips) {
  const Program empty;
  const auto text = format_program(empty);
  EXPECT_EQ(text, "format=1\n");
  EXPECT_TRUE(parse_program(text).defs.empty());
  EXPECT_TRUE(parse_program("").defs.empty());
}

TEST(FormatProgram, AddRoundTrips) {
  Program p;
  p.defs.push_back({"add", lib::add()});
  const auto text = format_program(p);
  EXPECT_EQ(text, "format=1\ndef add = primrec (proj 1 1) (compose succ ((proj 3 3)))\n");
  EXPECT_TRUE(same(parse_program(text), p));
}

TEST(FormatProgram, MachineRoundTrips) {
  Program p;
  p.defs.push_back({"pp", machines::ping_pong()});
  EXPECT_TRUE(same(parse_program(format_program(p)), p));
  EXPECT_EQ(parse_machine(format_machine(machines::ping_pong())), machines::ping_pong());
}

TEST(FormatProgram, RoundTripProperty) {
  gen::Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const auto p = gen::random_program(rng);
    const auto text = format_program(p);
    ASSERT_TRUE(same(parse_program(text), p)) << text;
    ASSERT_EQ(format_program(parse_program(text)), text);
  }
}

TEST(ParseProgram, NeverThrowsAnythingButParseError) {
  gen::Rng rng(1);
  const std::string alphabet = "defzrosucpjmin()=-> 0123456789\n#_\t\xff\x01LR";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const auto len = gen::pick(rng, 0, 120);
    for (std::uint32_t k = 0; k < len; ++k) text += alphabet[gen::pick(rng, 0, alphabet.size() - 1)];
    try {
      parse_program(text);
    } catch (const ParseError&) {
    }
    try {
      parse_machine(text);
    } catch (const ParseError&) {
    }
  }
}

TEST(ParseProgram, DeepNestingIsDiagnosed) {
  std::string text = "def f = ";
  for (int i = 0; i < 5000; ++i) text += '(';
  text += "zero";
  for (int i = 0; i < 5000; ++i) text += ')';
  EXPECT_THROW(parse_program(text), ParseError);
}
