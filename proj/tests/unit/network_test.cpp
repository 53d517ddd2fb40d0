#include "qpn/network.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "qpn/errors.hpp"
#include "qpn/io.hpp"
#include "random_net.hpp"

using namespace qpn;

namespace {

bool has_rule(const std::vector<Violation>& vs, const std::string& rule) {
  for (const auto& v : vs)
    if (v.rule == rule) return true;
  return false;
}

}  // namespace

TEST_CASE("edges into deterministic nodes default to strict") {
  Network net = load_network("node a prob\nnode c det\nedge a c +");
  CHECK(net.node_count() == 2);
  CHECK(net.edge_count() == 1);
  auto e = net.edge("a", "c");
  REQUIRE(e);
  CHECK(e->sign == Sign::Plus);
  CHECK(e->strict);

  Network p = load_network("node a prob\nnode c prob\nedge a c +");
  CHECK_FALSE(p.strict("a", "c"));
  Network q = load_network("node a prob\nnode c prob\nedge a c - strict");
  CHECK(q.strict("a", "c"));
}

TEST_CASE("shortcut network text loads") {
  Network net = load_network_file(testing::fixture("shortcut_det.qpn"));
  CHECK(net.node_count() == 4);
  CHECK(net.edge_count() == 4);
  CHECK(net.is_deterministic("w"));
  CHECK(net == testing::shortcut(NodeKind::Deterministic));
}

TEST_CASE("self loop and cycle are parse errors") {
  CHECK_THROWS_AS(load_network("node a prob\nedge a a +"), ParseError);
  try {
    load_network_file(testing::fixture("broken_cycle.qpn"));
    FAIL("cycle accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
}

TEST_CASE("parse errors carry a position") {
  try {
    load_network("node a prob\nedge a b +\n");
    FAIL("unknown node accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
  CHECK_THROWS_AS(load_network("node a maybe"), ParseError);
  CHECK_THROWS_AS(load_network("node a prob\nnode a det"), ParseError);
  CHECK_THROWS_AS(load_network("node a prob\nnode b prob\nedge a b ? strict"),
                  ParseError);
  CHECK_THROWS_AS(load_network("node 1a prob"), ParseError);
  CHECK_THROWS_AS(load_network("node a prob\nnode b prob\ncurvature a b +"),
                  ParseError);
}

TEST_CASE("comments and blank lines are ignored") {
  Network net = load_network("# header\n\nnode a prob # trailing\n");
  CHECK(net.node_count() == 1);
}

TEST_CASE("zero edge is not stored") {
  CHECK_THROWS_AS(load_network("node a prob\nnode b prob\nedge a b 0"),
                  ParseError);
  Network net = load_network("node a prob\nnode b prob\nedge a b +");
  net.set_edge("a", "b", Sign::Zero);
  CHECK(net.edge_count() == 0);
  CHECK(net.sign("a", "b") == Sign::Zero);
  CHECK(net.children("a").empty());
}

TEST_CASE("serialize empty network") {
  CHECK(serialize(Network{}) == std::string(kSerializeHeader));
}

TEST_CASE("serialize the shortcut network canonically") {
  const std::string expected = std::string(kSerializeHeader) +
                               "node w det\n"
                               "node x prob\n"
                               "node y prob\n"
                               "node z prob\n"
                               "edge w x +\n"
                               "edge w y +\n"
                               "edge z w +\n"
                               "edge z x +\n";
  CHECK(serialize(testing::shortcut(NodeKind::Deterministic)) == expected);
  // Declaration order does not matter.
  Network shuffled = load_network(
      "node y prob\nnode z prob\nnode x prob\nnode w det\n"
      "edge z x +\nedge w y +\nedge z w +\nedge w x +\n");
  CHECK(serialize(shuffled) == expected);
}

TEST_CASE("serialize writes only non-default strictness") {
  Network net = load_network(
      "node a prob\nnode b det\nnode c prob\n"
      "edge a b + nonstrict\nedge a c - strict\n");
  std::string text = serialize(net);
  CHECK(text.find("edge a b + nonstrict") != std::string::npos);
  CHECK(text.find("edge a c - strict") != std::string::npos);
}

TEST_CASE("serialize round trips random networks") {
  std::mt19937_64 rng(11);
  testing::RandomNetOptions opts;
  opts.min_nodes = 6;
  opts.synergy_probability = 0.3;
  opts.curvature_probability = 0.5;
  for (int i = 0; i < 200; ++i) {
    Network net = testing::random_network(rng, opts);
    Network back = load_network(serialize(net));
    CHECK(back == net);
    CHECK(serialize(back) == serialize(net));
  }
}

TEST_CASE("validate") {
  CHECK(validate(testing::shortcut(NodeKind::Probabilistic)).empty());

  Network cyc;
  cyc.add_node("a", NodeKind::Probabilistic);
  cyc.add_node("b", NodeKind::Probabilistic);
  cyc.set_edge("a", "b", Sign::Plus);
  cyc.set_edge("b", "a", Sign::Plus);
  CHECK(has_rule(validate(cyc), "cycle"));
  CHECK_THROWS_AS(cyc.topological_order(), ValidationError);

  Network curv;
  curv.add_node("a", NodeKind::Probabilistic);
  curv.add_node("b", NodeKind::Probabilistic);
  curv.set_edge("a", "b", Sign::Plus);
  curv.set_curvature("a", "b", Sign::Plus);
  CHECK(has_rule(validate(curv), "curvature-probabilistic-child"));

  Network syn = testing::shortcut(NodeKind::Probabilistic);
  syn.set_synergy("z", "y", "x", Sign::Plus);
  CHECK(has_rule(validate(syn), "synergy-not-parent"));
}

TEST_CASE("unspecified synergy and curvature read as unknown") {
  Network net = load_network_file(testing::fixture("tax.qpn"));
  CHECK(net.synergy("salary", "interest", "income") == Sign::Zero);
  CHECK(net.synergy("income", "deductions", "taxes") == Sign::Ambig);
  CHECK(net.synergy("salary", "deductions", "taxes") == Sign::Zero);
  CHECK(net.curvature("income", "taxes") == Sign::Ambig);
  CHECK(net.curvature("salary", "taxes") == Sign::Zero);
}

TEST_CASE("remove_node drops incident edges and annotations") {
  Network net = load_network_file(testing::fixture("tax_progressive.qpn"));
  net.remove_node("income");
  CHECK(net.edge_count() == 1);
  CHECK(net.synergies().empty());
  CHECK(net.curvatures().empty());
  CHECK(validate(net).empty());
}

TEST_CASE("topological order breaks ties lexicographically") {
  auto order = testing::shortcut(NodeKind::Probabilistic).topological_order();
  CHECK(order == std::vector<std::string>{"z", "w", "x", "y"});
}

TEST_CASE("dot export") {
  Network det = load_network("node a det");
  CHECK(to_dot(det).find("peripheries=2") != std::string::npos);

  Network tax = load_network_file(testing::fixture("tax.qpn"));
  std::string dot = to_dot(tax);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("label=\"0\"") != std::string::npos);

  Network neg = load_network("node a prob\nnode b prob\nedge a b -");
  CHECK(to_dot(neg).find("\"a\" -> \"b\" [label=\"-\"]") != std::string::npos);
}
