#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpn/sign.hpp"

namespace qpn {

enum class NodeKind { Probabilistic, Deterministic };

std::string_view to_string(NodeKind kind);

/// A signed influence on an edge. `strict` marks strict monotonicity, which
/// is what makes a deterministic relation invertible.
struct Influence {
  Sign sign = Sign::Ambig;
  bool strict = false;

  friend bool operator==(const Influence&, const Influence&) = default;
};

/// Default strictness of an edge into a node of the given kind.
constexpr bool default_strict(NodeKind child) {
  return child == NodeKind::Deterministic;
}

struct EdgeKey {
  std::string parent;
  std::string child;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// Unordered pair plus child; `first < second` always holds.
struct SynergyKey {
  std::string first;
  std::string second;
  std::string child;

  SynergyKey() = default;
  SynergyKey(std::string a, std::string b, std::string c);

  friend auto operator<=>(const SynergyKey&, const SynergyKey&) = default;
};

struct NodeInfo {
  NodeKind kind = NodeKind::Probabilistic;
  std::set<std::string> parents;
  std::set<std::string> children;

  friend bool operator==(const NodeInfo&, const NodeInfo&) = default;
};

struct Violation {
  std::string rule;
  std::string element;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Hybrid qualitative network: probabilistic and deterministic nodes, signed
/// influence edges, pairwise synergies and univariate curvature annotations.
///
/// Mutators keep referential integrity (edges only between known nodes, no
/// stored zero edge). Global rules such as acyclicity and synergy parenthood
/// are checked by validate(); load_network() rejects anything validate()
/// would flag. All ordering is lexicographic, so iteration is deterministic.
class Network {
 public:
  void add_node(const std::string& name, NodeKind kind);
  void remove_node(const std::string& name);
  void set_kind(const std::string& name, NodeKind kind);

  /// Zero removes the edge. Strictness defaults from the child's kind.
  void set_edge(const std::string& parent, const std::string& child, Sign sign);
  void set_edge(const std::string& parent, const std::string& child, Sign sign,
                bool strict);
  void remove_edge(const std::string& parent, const std::string& child);

  /// Ambig removes the entry, since an absent synergy reads as unknown.
  void set_synergy(const std::string& a, const std::string& b,
                   const std::string& child, Sign sign);
  void set_curvature(const std::string& parent, const std::string& child,
                     Sign sign);

  bool has_node(const std::string& name) const;
  NodeKind kind(const std::string& name) const;
  bool is_deterministic(const std::string& name) const;

  std::optional<Influence> edge(const std::string& parent,
                                const std::string& child) const;
  /// Sign of the parent -> child influence; Zero when no edge.
  Sign sign(const std::string& parent, const std::string& child) const;
  bool strict(const std::string& parent, const std::string& child) const;

  /// Sign of the synergy of {a, b} on child. Zero when either member is not
  /// a parent of child (no interaction is possible); Ambig when both are
  /// parents and nothing is stored.
  Sign synergy(const std::string& a, const std::string& b,
               const std::string& child) const;
  /// Stored curvature; Zero when `parent` is not a parent of child, Ambig
  /// when unannotated.
  Sign curvature(const std::string& parent, const std::string& child) const;

  const std::set<std::string>& parents(const std::string& name) const;
  const std::set<std::string>& children(const std::string& name) const;
  std::vector<std::string> node_names() const;

  const std::map<std::string, NodeInfo>& nodes() const { return nodes_; }
  const std::map<EdgeKey, Influence>& edges() const { return edges_; }
  const std::map<SynergyKey, Sign>& synergies() const { return synergies_; }
  const std::map<EdgeKey, Sign>& curvatures() const { return curvatures_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Kahn order with lexicographic tie breaking. Throws ValidationError on a
  /// cycle.
  std::vector<std::string> topological_order() const;
  /// Length of the longest directed path from any root to `name`.
  std::map<std::string, int> depths() const;
  /// Directed path from `from` to `to`, optionally ignoring the direct edge
  /// between them. Empty when none exists.
  std::vector<std::string> find_path(const std::string& from,
                                     const std::string& to,
                                     bool skip_direct_edge = false) const;
  std::set<std::string> descendants(const std::string& name) const;

  /// Drops synergy entries whose members are no longer parents of the child
  /// and curvature entries that no longer apply.
  void prune_annotations();
  /// Removes every synergy entry with the given child.
  void forget_synergies_on(const std::string& child);
  void forget_curvatures_on(const std::string& child);

  std::string summary() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  NodeInfo& info(const std::string& name);
  const NodeInfo& info(const std::string& name) const;

  std::map<std::string, NodeInfo> nodes_;
  std::map<EdgeKey, Influence> edges_;
  std::map<SynergyKey, Sign> synergies_;
  std::map<EdgeKey, Sign> curvatures_;
};

/// Identifier rule shared by the file format and the CLI.
bool is_valid_name(std::string_view name);

/// Every broken invariant, in a stable order. Empty iff the network is valid.
std::vector<Violation> validate(const Network& net);

}  // namespace qpn
