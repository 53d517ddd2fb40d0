#include "random_net.hpp"

#include <algorithm>

namespace qpn::testing {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

Network random_network(std::mt19937_64& rng, const RandomNetOptions& opts) {
  const int n = uniform_int(rng, opts.min_nodes, opts.max_nodes);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, char('a' + i)));
  std::shuffle(names.begin(), names.end(), rng);

  Network net;
  for (const auto& name : names)
    net.add_node(name, chance(rng, opts.det_probability)
                           ? NodeKind::Deterministic
                           : NodeKind::Probabilistic);

  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::shuffle(slots.begin(), slots.end(), rng);
  const int edges =
      uniform_int(rng, 1, std::min<int>(opts.max_edges, slots.size()));
  for (int e = 0; e < edges; ++e) {
    auto [i, j] = slots[e];
    Sign s = chance(rng, opts.ambig_probability)
                 ? Sign::Ambig
                 : (chance(rng, 0.5) ? Sign::Plus : Sign::Minus);
    net.set_edge(names[i], names[j], s);
  }

  for (const auto& name : names) {
    std::vector<std::string> ps(net.parents(name).begin(),
                                net.parents(name).end());
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        if (chance(rng, opts.synergy_probability)) {
          const Sign pick[] = {Sign::Plus, Sign::Minus, Sign::Zero};
          net.set_synergy(ps[i], ps[j], name, pick[uniform_int(rng, 0, 2)]);
        }
    if (net.is_deterministic(name))
      for (const auto& p : ps)
        if (chance(rng, opts.curvature_probability)) {
          const Sign pick[] = {Sign::Plus, Sign::Minus, Sign::Zero};
          net.set_curvature(p, name, pick[uniform_int(rng, 0, 2)]);
        }
  }
  return net;
}

InfluenceQuery random_query(std::mt19937_64& rng, const Network& net) {
  auto names = net.node_names();
  std::shuffle(names.begin(), names.end(), rng);
  InfluenceQuery q{names[0], names[1], {}};
  const int extra = std::min<int>(uniform_int(rng, 0, 2), names.size() - 2);
  for (int i = 0; i < extra; ++i) q.given.insert(names[2 + i]);
  return q;
}

}  // namespace qpn::testing
