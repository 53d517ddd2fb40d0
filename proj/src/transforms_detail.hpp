#pragma once

#include <string>

#include "qpn/transforms.hpp"

namespace qpn::detail {

// Shared by the influence-only entry points and the synergy-aware ones.
StepResult propagate(const Network& net, const std::string& c,
                     bool with_synergy);
StepResult splice_single_successor(const Network& net, const std::string& c,
                                   bool with_synergy);
TransformResult reduce(const Network& net, const std::string& c,
                       bool with_synergy);

std::string edge_name(const std::string& from, const std::string& to);

}  // namespace qpn::detail
