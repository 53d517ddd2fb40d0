#pragma once

#include <string>

#include "qpn/io.hpp"
#include "qpn/network.hpp"

namespace qpn::testing {

inline std::string fixture(const std::string& name) {
  return std::string(QPN_FIXTURE_DIR) + "/" + name;
}

// z -> w -> {x, y}, plus z -> x when `with_zx`.
inline Network shortcut(NodeKind w, Sign zw = Sign::Plus, Sign wx = Sign::Plus,
                    Sign wy = Sign::Plus, Sign zx = Sign::Plus,
                    bool with_zx = true) {
  Network net;
  net.add_node("z", NodeKind::Probabilistic);
  net.add_node("w", w);
  net.add_node("x", NodeKind::Probabilistic);
  net.add_node("y", NodeKind::Probabilistic);
  net.set_edge("z", "w", zw);
  net.set_edge("w", "x", wx);
  net.set_edge("w", "y", wy);
  if (with_zx) net.set_edge("z", "x", zx);
  return net;
}

inline Network fork(NodeKind w) {
  return shortcut(w, Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus, false);
}

}  // namespace qpn::testing
