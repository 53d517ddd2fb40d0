#pragma once

#include <set>
#include <string>

#include "qpn/network.hpp"

namespace qpn {

struct SeparationQuery {
  std::string x;
  std::string y;
  std::set<std::string> given;
};

/// Least superset of `given` closed under "a deterministic node whose parents
/// are all in the set is in the set". Parentless deterministic nodes are
/// constants and always belong.
std::set<std::string> functional_closure(const Network& net,
                                         const std::set<std::string>& given);

/// Functional closure extended by inversion: a node p is determined when some
/// determined deterministic node d is, once the set and p are fixed, a
/// strictly monotone function of p (signs composed along deterministic paths,
/// so d is one-to-one in p). Used by the query engine;
/// D-separation itself is defined on the plain closure.
std::set<std::string> determined_closure(const Network& net,
                                         const std::set<std::string>& given);

/// Standard d-separation, evaluated with the active-trail reachability
/// algorithm rather than path enumeration.
bool d_separated(const Network& net, const SeparationQuery& q);

/// d-separation after closing the evidence under functional determination.
/// A query node that is itself functionally determined by the evidence is
/// separated from everything.
bool D_separated(const Network& net, const SeparationQuery& q);

/// Throws PreconditionError unless x != y, both exist and neither is given.
void check_query(const Network& net, const SeparationQuery& q);

}  // namespace qpn
