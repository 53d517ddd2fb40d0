#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "qpn/network.hpp"
#include "qpn/query.hpp"

namespace qpn::testing {

struct RandomNetOptions {
  int min_nodes = 2;
  int max_nodes = 6;
  int max_edges = 8;
  double det_probability = 0.35;
  /// Chance that an edge carries ? rather than + or -.
  double ambig_probability = 0.1;
  /// Chance of storing a definite synergy for each parent pair.
  double synergy_probability = 0.0;
  /// Chance of storing a curvature for each edge into a deterministic node.
  double curvature_probability = 0.0;
};

/// Random valid network. Node names are single letters; edges follow a
/// random hidden order, so lexicographic order carries no structure.
Network random_network(std::mt19937_64& rng, const RandomNetOptions& opts = {});

/// Random influence query on `net`: distinct source and target and up to
/// two given nodes drawn from the rest.
InfluenceQuery random_query(std::mt19937_64& rng, const Network& net);

int uniform_int(std::mt19937_64& rng, int lo, int hi);
bool chance(std::mt19937_64& rng, double p);

}  // namespace qpn::testing
