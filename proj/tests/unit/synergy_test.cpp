#include "qpn/synergy.hpp"

#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qpn/io.hpp"
#include "qpn/query.hpp"
#include "random_net.hpp"

using namespace qpn;

namespace {

Sign splice_result(const Network& net, const std::string& c,
                   const std::string& d, const SynergyKey& key) {
  for (const auto& [k, update] : synergy_after_splice(net, c, d))
    if (k == key) return update.after;
  FAIL("no update for the pair");
  return Sign::Ambig;
}

}  // namespace

TEST_CASE("single surviving term of the splice update") {
  // a, b -> c -> d, plus a -> d. Only d(b,c) * s{a,c},d is nonzero.
  Network net;
  for (auto n : {"a", "b", "c", "d"}) net.add_node(n, NodeKind::Probabilistic);
  net.set_edge("a", "c", Sign::Plus);
  net.set_edge("b", "c", Sign::Plus);
  net.set_edge("c", "d", Sign::Plus);
  net.set_edge("a", "d", Sign::Plus);
  net.set_edge("b", "d", Sign::Plus);
  net.set_synergy("a", "b", "d", Sign::Zero);
  net.set_synergy("a", "b", "c", Sign::Zero);
  net.set_synergy("a", "c", "d", Sign::Plus);
  net.set_synergy("b", "c", "d", Sign::Zero);
  CHECK(splice_result(net, "c", "d", SynergyKey("a", "b", "d")) == Sign::Plus);

  // b no longer feeds c: the term drops out.
  net.remove_edge("b", "c");
  CHECK(splice_result(net, "c", "d", SynergyKey("a", "b", "d")) == Sign::Zero);
}

TEST_CASE("tax example reduction") {
  auto tax = load_network_file(testing::fixture("tax.qpn"));
  auto prog = load_network_file(testing::fixture("tax_progressive.qpn"));
  auto regr = load_network_file(testing::fixture("tax_regressive.qpn"));
  SynergyKey key("salary", "interest", "taxes");
  CHECK(splice_result(tax, "income", "taxes", key) == Sign::Ambig);
  CHECK(splice_result(prog, "income", "taxes", key) == Sign::Plus);
  CHECK(splice_result(regr, "income", "taxes", key) == Sign::Minus);

  auto r = reduce_with_synergy(prog, "income");
  CHECK(r.trace.synergy_aware);
  CHECK(r.net.synergy("salary", "interest", "taxes") == Sign::Plus);
}

TEST_CASE("synergy queries") {
  SynergyQuery q{"salary", "interest", "taxes", {}};
  auto none = qualitative_synergy(
      load_network_file(testing::fixture("tax.qpn")), q);
  CHECK(none.sign == Sign::Ambig);
  auto prog = qualitative_synergy(
      load_network_file(testing::fixture("tax_progressive.qpn")), q);
  CHECK(prog.sign == Sign::Plus);
  CHECK(prog.context == std::set<std::string>{"deductions"});
  auto regr = qualitative_synergy(
      load_network_file(testing::fixture("tax_regressive.qpn")), q);
  CHECK(regr.sign == Sign::Minus);
}

TEST_CASE("stored synergy on direct parents") {
  Network net;
  for (auto n : {"a", "b", "c"}) net.add_node(n, NodeKind::Probabilistic);
  net.set_edge("a", "c", Sign::Plus);
  net.set_edge("b", "c", Sign::Plus);
  net.set_synergy("a", "b", "c", Sign::Plus);
  auto r = qualitative_synergy(net, {"a", "b", "c", {}});
  CHECK(r.sign == Sign::Plus);
  CHECK(r.trace.steps.empty());
}

TEST_CASE("synergy-free networks answer influence queries the same way") {
  // Annotating synergies must not change first-order answers.
  std::mt19937_64 rng(21);
  testing::RandomNetOptions rich;
  rich.synergy_probability = 0.5;
  rich.curvature_probability = 0.5;
  for (int i = 0; i < 150; ++i) {
    Network a = testing::random_network(rng, rich);
    Network b = a;
    for (const auto& [k, s] : a.synergies())
      b.set_synergy(k.first, k.second, k.child, Sign::Ambig);
    for (const auto& [k, s] : a.curvatures())
      b.set_curvature(k.parent, k.child, Sign::Ambig);
    auto q = testing::random_query(rng, a);
    CHECK(qualitative_influence(a, q).sign ==
          qualitative_influence(b, q).sign);
  }
}
