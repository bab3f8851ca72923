#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ralu/parser.hpp"
#include "ralu/unitizer.hpp"

using namespace ralu;

namespace {

const std::string kEulerianBuggy =
    "def eulerian_num(n, m):\n"
    "    if m < 0 or m >= n:\n"
    "        return 0\n"
    "    if n == 0:\n"
    "        return 1\n"
    "    return (n - m) * eulerian_num(n - 1, m - 1) + (m + 1) * "
    "eulerian_num(n - 1, m)\n";

// Frozen unit texts for the eulerian_num listing, default delimiters.
const std::string kUnit1 =
    "#ENTER FUNCTION# eulerian_num\n"
    "#BRANCH# If Condition `if m < 0 or m >= n' is satisfied, then RUN "
    "`return 0'";
const std::string kUnit2 =
    "#BRANCH# Otherwise, when Condition `if m < 0 or m >= n' is not "
    "satisfied, then #BRANCH# If Condition `if n == 0' is satisfied, then "
    "RUN `return 1'";
const std::string kUnit3 =
    "#BRANCH# Otherwise, when Condition `if n == 0' is not satisfied, then "
    "RUN `return (n - m) * eulerian_num(n - 1, m - 1) + (m + 1) * "
    "eulerian_num(n - 1, m)'\n"
    "#EXIT FUNCTION#";

UnitSequence units_for(const std::string& source, const std::string& fn) {
  SyntaxTree tree = parse_program(source);
  return extract_units_cfg(build_cfg(tree, fn));
}

void check_coverage(const ControlFlowGraph& cfg, const UnitSequence& seq) {
  std::map<int, int> counts;
  for (const auto& u : seq.units)
    for (int id : u.block_refs) ++counts[id];
  for (const auto& b : cfg.blocks) {
    INFO("block " << b.id);
    CHECK(counts[b.id] == 1);
  }
  std::size_t total = 0;
  for (const auto& [id, n] : counts) total += static_cast<std::size_t>(n);
  CHECK(total == cfg.blocks.size());
}

} // namespace

TEST_CASE("eulerian_num yields the three frozen unit texts") {
  UnitSequence seq = units_for(kEulerianBuggy, "eulerian_num");
  REQUIRE(seq.units.size() == 3);
  CHECK(seq.units[0].text == kUnit1);
  CHECK(seq.units[1].text == kUnit2);
  CHECK(seq.units[2].text == kUnit3);
  CHECK(seq.units[0].kind == UnitKind::FunctionEntry);
  CHECK(seq.units[1].kind == UnitKind::Branch);
  CHECK(seq.units[2].kind == UnitKind::Branch);
}

TEST_CASE("unit indices are contiguous from zero") {
  UnitSequence seq = units_for(kEulerianBuggy, "eulerian_num");
  for (std::size_t i = 0; i < seq.units.size(); ++i)
    CHECK(seq.units[i].index == static_cast<int>(i));
}

TEST_CASE("straight-line function folds into one unit") {
  UnitSequence seq = units_for(
      "def f():\n    a = 1\n    b = a + 2\n    return b\n", "f");
  REQUIRE(seq.units.size() == 1);
  CHECK(seq.units[0].text ==
        "#ENTER FUNCTION# f\n"
        "RUN `a = 1'\n"
        "RUN `b = a + 2'\n"
        "RUN `return b'\n"
        "#EXIT FUNCTION#");
}

TEST_CASE("while loop cuts into pre-loop, loop, post-loop units") {
  UnitSequence seq = units_for(
      "def sum_below(n):\n"
      "    total = 0\n"
      "    i = 0\n"
      "    while i < n:\n"
      "        total += i\n"
      "        i += 1\n"
      "    return total\n",
      "sum_below");
  REQUIRE(seq.units.size() == 3);
  CHECK(seq.units[0].text ==
        "#ENTER FUNCTION# sum_below\n"
        "RUN `total = 0'\n"
        "RUN `i = 0'");
  CHECK(seq.units[1].text ==
        "#LOOP BEGIN# `while i < n'\n"
        "RUN `total += i'\n"
        "RUN `i += 1'\n"
        "#LOOP END#");
  CHECK(seq.units[1].kind == UnitKind::LoopBody);
  CHECK(seq.units[2].text ==
        "RUN `return total'\n"
        "#EXIT FUNCTION#");
}

TEST_CASE("if/else with a join produces three units") {
  UnitSequence seq = units_for(
      "def clamp_sign(x):\n"
      "    if x > 0:\n"
      "        y = 1\n"
      "    else:\n"
      "        y = -1\n"
      "    return y\n",
      "clamp_sign");
  REQUIRE(seq.units.size() == 3);
  CHECK(seq.units[0].text ==
        "#ENTER FUNCTION# clamp_sign\n"
        "#BRANCH# If Condition `if x > 0' is satisfied, then RUN `y = 1'");
  CHECK(seq.units[1].text ==
        "#BRANCH# Otherwise, when Condition `if x > 0' is not satisfied, "
        "then RUN `y = -1'");
  CHECK(seq.units[2].text ==
        "RUN `return y'\n"
        "#EXIT FUNCTION#");
}

TEST_CASE("multi-statement arms use the RUN bracket form") {
  UnitSequence seq = units_for(
      "def f(s, n):\n"
      "    if n > 0:\n"
      "        parts = s.split()\n"
      "        apples = int(parts[0])\n"
      "        return apples\n"
      "    return 0\n",
      "f");
  REQUIRE(seq.units.size() == 2);
  CHECK(seq.units[0].text ==
        "#ENTER FUNCTION# f\n"
        "#BRANCH# If Condition `if n > 0' is satisfied, then RUN [\n"
        "parts = s.split()\n"
        "apples = int(parts[0])\n"
        "return apples\n"
        "]");
  CHECK(seq.units[1].text ==
        "#BRANCH# Otherwise, when Condition `if n > 0' is not satisfied, "
        "then RUN `return 0'\n"
        "#EXIT FUNCTION#");
}

TEST_CASE("block coverage is exact across corpus shapes") {
  const char* sources[] = {
      "def f():\n    a = 1\n    b = a + 2\n    return b\n",
      "def g(n):\n    total = 0\n    while n > 0:\n        total += n\n"
      "        n -= 1\n    return total\n",
      "def h(x):\n    if x > 0:\n        y = 1\n    else:\n        y = -1\n"
      "    return y\n",
  };
  for (const char* src : sources) {
    SyntaxTree tree = parse_program(src);
    std::string fn = tree.function_names().front();
    ControlFlowGraph cfg = build_cfg(tree, fn);
    UnitSequence seq = extract_units_cfg(cfg);
    check_coverage(cfg, seq);
  }
  SyntaxTree tree = parse_program(kEulerianBuggy);
  ControlFlowGraph cfg = build_cfg(tree, "eulerian_num");
  check_coverage(cfg, extract_units_cfg(cfg));
}

TEST_CASE("order preservation: unit statements follow source order") {
  SyntaxTree tree = parse_program(kEulerianBuggy);
  ControlFlowGraph cfg = build_cfg(tree, "eulerian_num");
  UnitSequence seq = extract_units_cfg(cfg);

  std::vector<const SyntaxNode*> in_units;
  for (const auto& u : seq.units)
    for (int id : u.block_refs) {
      const BasicBlock* b = cfg.block(id);
      if (!b) continue;
      for (const auto& s : b->statements) in_units.push_back(s.node);
    }
  std::vector<std::size_t> offsets;
  for (const auto* n : in_units) offsets.push_back(n->span.byte_start);
  CHECK(std::is_sorted(offsets.begin(), offsets.end()));
}

TEST_CASE("quote delimiters are configurable") {
  SyntaxTree tree = parse_program("def f():\n    return 0\n");
  UnitTextOptions ascii;
  ascii.open_quote = "'";
  ascii.close_quote = "'";
  UnitSequence seq = extract_units_cfg(build_cfg(tree, "f"), ascii);
  CHECK(seq.units[0].text.find("RUN 'return 0'") != std::string::npos);
}

TEST_CASE("line-by-line units keep indentation inside the quotes") {
  UnitSequence seq = extract_units_line_by_line(kEulerianBuggy);
  REQUIRE(seq.units.size() == 6);
  CHECK(seq.units[0].text == "RUN `def eulerian_num(n, m):'");
  CHECK(seq.units[1].text == "RUN `    if m < 0 or m >= n:'");
  CHECK(seq.units[2].text == "RUN `        return 0'");
  for (const auto& u : seq.units) {
    CHECK(u.kind == UnitKind::Line);
    CHECK(u.block_refs.empty());
  }
}

TEST_CASE("line-by-line skips blanks and comment lines") {
  UnitSequence one = extract_units_line_by_line("x = 1\n");
  CHECK(one.units.size() == 1);
  UnitSequence seq = extract_units_line_by_line(
      "a = 1\n\n# comment\nb = 2\n   \nc = 3\n");
  CHECK(seq.units.size() == 3);
}

TEST_CASE("nl-step units parse Step tags in order") {
  std::string response =
      "<Step>1: John starts with 10 apples.</Step>\n"
      "<Step>2: He gives away 4, so 10 - 4 = 6.</Step>\n"
      "<Step>3: He then receives 5 more apples, so 6 + 5 = 11.</Step>\n"
      "<Answer>11</Answer>\n";
  UnitSequence seq = extract_units_nl_steps(response);
  REQUIRE(seq.units.size() == 3);
  CHECK(seq.units[0].text == "1: John starts with 10 apples.");
  CHECK(seq.units[2].text ==
        "3: He then receives 5 more apples, so 6 + 5 = 11.");
  CHECK(seq.units[0].kind == UnitKind::NlStep);
}

TEST_CASE("nl-step units: singleton and error path") {
  CHECK(extract_units_nl_steps("<Step>1: a</Step>").units.size() == 1);
  CHECK_THROWS_AS(extract_units_nl_steps("no tags at all"), NoStepsFound);
}

TEST_CASE("nl-step units are reordered by their leading number") {
  UnitSequence seq = extract_units_nl_steps(
      "<Step>2: second</Step><Step>1: first</Step>");
  REQUIRE(seq.units.size() == 2);
  CHECK(seq.units[0].text == "1: first");
  CHECK(seq.units[1].text == "2: second");
}

TEST_CASE("elif chains render as otherwise-folded units") {
  UnitSequence seq = units_for(
      "def grade(score):\n"
      "    if score >= 90:\n"
      "        return \"A\"\n"
      "    elif score >= 80:\n"
      "        return \"B\"\n"
      "    else:\n"
      "        return \"F\"\n",
      "grade");
  REQUIRE(seq.units.size() == 3);
  CHECK(seq.units[0].text ==
        "#ENTER FUNCTION# grade\n"
        "#BRANCH# If Condition `if score >= 90' is satisfied, then RUN "
        "`return \"A\"'");
  CHECK(seq.units[1].text ==
        "#BRANCH# Otherwise, when Condition `if score >= 90' is not "
        "satisfied, then #BRANCH# If Condition `elif score >= 80' is "
        "satisfied, then RUN `return \"B\"'");
  CHECK(seq.units[2].text ==
        "#BRANCH# Otherwise, when Condition `elif score >= 80' is not "
        "satisfied, then RUN `return \"F\"'\n"
        "#EXIT FUNCTION#");
}
