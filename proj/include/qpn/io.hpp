#pragma once

#include <istream>
#include <string>
#include <string_view>

#include "qpn/network.hpp"

namespace qpn {

/// Parses the line-oriented network format:
///
///   node <name> prob|det
///   edge <parent> <child> <sign> [strict|nonstrict]
///   synergy <name1> <name2> <child> <sign>
///   curvature <parent> <child> <sign>
///
/// `#` starts a comment. Nodes must be declared before they are referenced.
/// Throws ParseError with a 1-based line and column on the first problem.
Network load_network(std::string_view text);
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);

/// Canonical text: header comment, then nodes, edges, synergies and
/// curvatures, each in lexicographic order. The strictness flag is written
/// only when it differs from the child's default.
std::string serialize(const Network& net);

/// Graphviz digraph. Deterministic nodes get a doubled ellipse, edges carry
/// their sign, synergies are dashed undirected links between the pair.
std::string to_dot(const Network& net);

inline constexpr std::string_view kSerializeHeader =
    "# qualitative probabilistic network\n";

}  // namespace qpn
