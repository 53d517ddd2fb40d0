#pragma once

#include <set>
#include <string>
#include <vector>

#include "qpn/network.hpp"
#include "qpn/transforms.hpp"

namespace qpn {

/// Qualitative influence of `source` on `target` with the `given` nodes
/// held fixed. Given nodes are never eliminated; their presence in the final
/// network is what encodes the conditioning.
struct InfluenceQuery {
  std::string source;
  std::string target;
  std::set<std::string> given;
};

struct QueryOptions {
  /// Re-run the plan with each single alternative reversal choice and note
  /// when one of them would have produced a stronger sign.
  bool lookahead = true;
};

struct QueryResult {
  InfluenceQuery query;
  Sign sign = Sign::Ambig;
  Trace trace;
  /// Contains exactly the source, the target and the given nodes, with the
  /// target barren. The source -> target edge (absent means 0) is `sign`.
  /// This is the replay of `trace`, except that the source -> target edge is
  /// dropped when the answer was refined to 0 by separation (see notes).
  Network final_net;
  std::vector<std::string> notes;
};

void check_query(const Network& net, const InfluenceQuery& q);

/// Greedy elimination plan. At each step, in priority order:
///   1. remove a barren unprotected node;
///   2. propagate an unprotected deterministic node, first reversing any
///      strict arc from it into a given deterministic node (the node is then
///      known from the evidence, which propagation alone would forget);
///   3. reduce an unprotected probabilistic node with one successor;
///   4. reverse the shallowest arc out of an unprotected probabilistic node
///      with several successors;
///   5. once only protected nodes remain, clear the target's outgoing arcs
///      (propagation when it is deterministic, after the same reversals into
///      given deterministic nodes as in 2; reversal otherwise).
/// Candidates are taken in reverse topological order, ties lexicographic.
/// Every step strictly shrinks (node count, arcs out of unprotected nodes,
/// arcs out of the target), except the reversals into given deterministic
/// nodes; each of those turns a given node into a parent for good (the
/// reverse path would be a cycle), so only finitely many occur and the plan
/// always terminates on a DAG.
std::vector<TransformOp> plan(const Network& net, const InfluenceQuery& q);

QueryResult qualitative_influence(const Network& net, const InfluenceQuery& q,
                                  const QueryOptions& opts = {});

/// One line per step with the operation, the reversal case when there is
/// one, and every sign update written out.
std::string explain(const QueryResult& result);

}  // namespace qpn
