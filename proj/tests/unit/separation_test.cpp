#include "qpn/separation.hpp"

#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qpn/errors.hpp"
#include "random_net.hpp"

using namespace qpn;

using Names = std::set<std::string>;

TEST_CASE("functional closure") {
  CHECK(functional_closure(testing::fork(NodeKind::Deterministic), {"z"}) ==
        Names{"z", "w"});
  CHECK(functional_closure(testing::fork(NodeKind::Probabilistic), {"z"}) ==
        Names{"z"});

  Network chain;
  chain.add_node("z", NodeKind::Probabilistic);
  chain.add_node("w1", NodeKind::Deterministic);
  chain.add_node("w2", NodeKind::Deterministic);
  chain.set_edge("z", "w1", Sign::Plus);
  chain.set_edge("w1", "w2", Sign::Minus);
  CHECK(functional_closure(chain, {"z"}) == Names{"z", "w1", "w2"});
}

TEST_CASE("parentless deterministic nodes are constants") {
  Network net;
  net.add_node("k", NodeKind::Deterministic);
  net.add_node("x", NodeKind::Probabilistic);
  net.set_edge("k", "x", Sign::Plus);
  CHECK(functional_closure(net, {}) == Names{"k"});
}

TEST_CASE("fork d-separation") {
  auto prob = testing::fork(NodeKind::Probabilistic);
  auto det = testing::fork(NodeKind::Deterministic);
  CHECK_FALSE(d_separated(prob, {"x", "y", {"z"}}));
  CHECK_FALSE(d_separated(det, {"x", "y", {"z"}}));
  CHECK(d_separated(prob, {"x", "y", {"w"}}));
  CHECK(D_separated(det, {"x", "y", {"z"}}));
  CHECK_FALSE(D_separated(prob, {"x", "y", {"z"}}));
}

TEST_CASE("disconnected nodes are separated") {
  Network net;
  net.add_node("x", NodeKind::Probabilistic);
  net.add_node("y", NodeKind::Probabilistic);
  CHECK(d_separated(net, {"x", "y", {}}));
  CHECK(D_separated(net, {"x", "y", {}}));
}

TEST_CASE("collider opens on a given descendant") {
  Network net;
  for (auto n : {"a", "b", "c", "d"}) net.add_node(n, NodeKind::Probabilistic);
  net.set_edge("a", "c", Sign::Plus);
  net.set_edge("b", "c", Sign::Plus);
  net.set_edge("c", "d", Sign::Plus);
  CHECK(d_separated(net, {"a", "b", {}}));
  CHECK_FALSE(d_separated(net, {"a", "b", {"c"}}));
  CHECK_FALSE(d_separated(net, {"a", "b", {"d"}}));
}

TEST_CASE("query preconditions") {
  auto net = testing::fork(NodeKind::Probabilistic);
  CHECK_THROWS_AS(d_separated(net, {"x", "x", {}}), PreconditionError);
  CHECK_THROWS_AS(d_separated(net, {"x", "q", {}}), Error);
  CHECK_THROWS_AS(D_separated(net, {"x", "y", {"x"}}), PreconditionError);
}

TEST_CASE("determined closure inverts strict functions") {
  // c = f(a) strictly increasing: observing c pins a.
  Network net;
  net.add_node("a", NodeKind::Probabilistic);
  net.add_node("c", NodeKind::Deterministic);
  net.set_edge("a", "c", Sign::Plus);
  CHECK(determined_closure(net, {"c"}) == Names{"a", "c"});
  net.set_edge("a", "c", Sign::Plus, false);
  CHECK(determined_closure(net, {"c"}) == Names{"c"});

  // d = g(b, h(b)) with both paths increasing is one-to-one in b.
  Network comp;
  comp.add_node("b", NodeKind::Probabilistic);
  comp.add_node("c", NodeKind::Deterministic);
  comp.add_node("d", NodeKind::Deterministic);
  comp.set_edge("b", "c", Sign::Minus);
  comp.set_edge("b", "d", Sign::Plus);
  comp.set_edge("c", "d", Sign::Minus);
  CHECK(determined_closure(comp, {"d"}) == Names{"b", "c", "d"});
  // Opposing paths: no longer monotone.
  comp.set_edge("c", "d", Sign::Plus);
  CHECK(determined_closure(comp, {"d"}) == Names{"d"});
}

TEST_CASE("separation properties on random networks") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    Network net = testing::random_network(rng);
    auto names = net.node_names();
    auto q = testing::random_query(rng, net);
    SeparationQuery s{q.source, q.target, q.given};
    // d-separation implies D-separation, and both are symmetric.
    if (d_separated(net, s)) CHECK(D_separated(net, s));
    SeparationQuery r{q.target, q.source, q.given};
    CHECK(d_separated(net, s) == d_separated(net, r));
    CHECK(D_separated(net, s) == D_separated(net, r));

    // Closure is extensive, monotone and idempotent.
    auto c = functional_closure(net, q.given);
    for (const auto& g : q.given) CHECK(c.count(g));
    CHECK(functional_closure(net, c) == c);
    auto bigger = q.given;
    bigger.insert(q.source);
    auto cb = functional_closure(net, bigger);
    for (const auto& n : c) CHECK(cb.count(n));
    auto dc = determined_closure(net, q.given);
    for (const auto& n : c) CHECK(dc.count(n));

    // With every deterministic node given, D equals d.
    auto all_det = q.given;
    for (const auto& n : names)
      if (net.is_deterministic(n) && n != q.source && n != q.target)
        all_det.insert(n);
    if (!net.is_deterministic(q.source) && !net.is_deterministic(q.target)) {
      SeparationQuery full{q.source, q.target, all_det};
      CHECK(d_separated(net, full) == D_separated(net, full));
    }
  }
}
