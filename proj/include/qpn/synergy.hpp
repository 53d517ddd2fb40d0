#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qpn/network.hpp"
#include "qpn/transforms.hpp"

namespace qpn {

struct SynergyQuery {
  std::string a;
  std::string b;
  std::string child;
  std::set<std::string> given;
};

struct SynergyResult {
  Sign sign = Sign::Ambig;
  Trace trace;
  Network final_net;
  /// Remaining parents of the child other than the pair. The answer holds
  /// for every fixed assignment of these (and of the given nodes).
  std::set<std::string> context;
  std::vector<std::string> notes;
};

/// New synergies on `d` after `c` is spliced out of its parent set, one per
/// pair of d's new parents:
///
///   s'{a,b},d = s{a,b},d + (s{a,b},c * d(c,d)) + (d(b,c) * s{a,c},d)
///               + (d(a,c) * s{b,c},d)
///
/// When c is deterministic the extra second-order term
/// d(a,c) * d(b,c) * k(c,d) is added, where k is the curvature of d in c
/// (unknown unless d is deterministic and annotated).
std::vector<std::pair<SynergyKey, SignUpdate>> synergy_after_splice(
    const Network& before, const std::string& c, const std::string& d);

/// reduce_node() that also carries synergies through the splice. Reversals
/// needed on the way still forget the synergies they touch.
TransformResult reduce_with_synergy(const Network& net, const std::string& c);

/// Reduces the nodes lying between the pair and the child, then reads the
/// stored synergy. Unknown whenever one of those reductions would need an
/// arc reversal.
SynergyResult qualitative_synergy(const Network& net, const SynergyQuery& q);

}  // namespace qpn
