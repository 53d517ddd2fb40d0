#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qpn/network.hpp"
#include "qpn/query.hpp"
#include "qpn/synergy.hpp"

namespace qpn {

struct OracleConfig {
  /// Explicit cardinalities. Probabilistic nodes default to 2, or 3 when they
  /// take part in a synergy or curvature annotation. A deterministic node's
  /// values are whatever its sampled function produces; an explicit entry
  /// caps how many distinct values it may take.
  std::map<std::string, int> cardinalities;
  int trials = 20;
  std::uint64_t seed = 1;
  /// Extra random increasing transforms of a probabilistic child tried by
  /// the synergy check, on top of the identity.
  int synergy_transforms = 10;
  /// Minimum step in some survival probability along a strict edge into a
  /// probabilistic node.
  double strict_margin = 1e-3;
  double tolerance = 1e-9;
};

inline constexpr std::size_t kOracleMaxNodes = 12;
inline constexpr std::uint64_t kOracleMaxJoint = std::uint64_t{1} << 20;

/// Concrete discrete parameterization. Every node has strictly increasing
/// cardinal `levels`; value indices refer into them. Probabilistic nodes
/// store a row-major CPT (one row per parent assignment, last parent
/// varying fastest); deterministic nodes store the level index per row.
struct NumericNode {
  std::string name;
  NodeKind kind = NodeKind::Probabilistic;
  std::vector<std::string> parents;
  std::vector<double> levels;
  std::vector<double> cpt;
  std::vector<int> table;

  int card() const { return static_cast<int>(levels.size()); }
  std::size_t rows() const;
  double prob(std::size_t row, int value) const {
    return cpt[row * levels.size() + value];
  }
};

class NumericNet {
 public:
  /// Nodes must be supplied in an order where parents precede children.
  explicit NumericNet(std::vector<NumericNode> nodes = {});

  const std::vector<NumericNode>& nodes() const { return nodes_; }
  const NumericNode& node(const std::string& name) const;
  std::size_t position(const std::string& name) const;
  bool has_node(const std::string& name) const { return index_.count(name); }

  /// Row of `n`'s table selected by a full assignment (indexed by position).
  std::size_t row_of(const NumericNode& n, const std::vector<int>& values) const;
  /// Row for explicit parent value indices, in n.parents order.
  std::size_t row_of(const NumericNode& n, const std::vector<int>& parent_values,
                     int) const;

  /// Calls `visit` for every full assignment with nonzero probability.
  /// Deterministic nodes are computed, not enumerated.
  void enumerate(
      const std::function<void(const std::vector<int>&, double)>& visit) const;

  /// Joint distribution keyed by value indices in lexicographic node-name
  /// order.
  std::map<std::vector<int>, double> joint() const;

 private:
  std::vector<NumericNode> nodes_;
  std::map<std::string, std::size_t> index_;
};

/// Draws a parameterization consistent with every sign, strictness, synergy
/// and curvature constraint of `net`. Deterministic for a given
/// (net, cfg, trial). Throws OracleError on a constraint conflict or when
/// the network is too large to enumerate.
NumericNet sample_numeric_net(const Network& net, const OracleConfig& cfg,
                              std::size_t trial);

struct AuditOptions {
  double tolerance = 1e-9;
  /// Required margin on strict edges into probabilistic nodes; 0 disables
  /// the strictness check there.
  double strict_margin = 1e-3;
  /// Skip comparisons whose conditioning rows have probability zero. Needed
  /// for tables obtained by Bayes reversal, whose zero-probability rows are
  /// arbitrary.
  bool skip_zero_probability_rows = false;
};

/// Checks that `nn` satisfies `net`: rows are distributions, every signed
/// edge is an FSD (or functional) monotonicity for every fixing of the other
/// parents, and stored synergies and curvatures hold. Returns one message per
/// failure.
std::vector<std::string> audit(const NumericNet& nn, const Network& net,
                               const AuditOptions& opts = {});

struct OracleViolation {
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::string assignment;
  std::string observed;
};

struct CheckReport {
  bool consistent = true;
  /// Largest amount by which the claimed ordering is broken; <= 0 when it
  /// holds everywhere.
  double worst_margin = -1.0;
  std::size_t comparisons = 0;
  std::size_t skipped_contexts = 0;
  std::vector<OracleViolation> violations;
};

/// Exact check of a claimed influence sign by joint enumeration: for each
/// assignment of the given nodes, the conditional CDFs of the target must be
/// ordered by first-order stochastic dominance in the source value (equal
/// for 0). Zero-probability conditioning events are skipped and counted.
CheckReport exact_influence_check(const NumericNet& nn, const InfluenceQuery& q,
                                  Sign claimed, double tolerance = 1e-9);

/// Mixed-difference test of E[phi(child) | a, b, context] over every pair
/// a1 > a2, b1 > b2, for every assignment of the context nodes. `phi` holds
/// one value per child level; empty means the identity on the levels.
CheckReport exact_synergy_check(const NumericNet& nn, const std::string& a,
                                const std::string& b, const std::string& child,
                                const std::set<std::string>& context,
                                Sign claimed, double tolerance = 1e-9,
                                const std::vector<double>& phi = {});

/// Bayes-rule reversal of the arc c -> d between probabilistic nodes.
NumericNet reverse_numeric(const NumericNet& nn, const std::string& c,
                           const std::string& d);

double max_joint_difference(const NumericNet& x, const NumericNet& y);

struct TrialRecord {
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  bool consistent = true;
  double worst_margin = 0;
  std::size_t skipped_contexts = 0;
};

struct OracleVerdict {
  std::string query;
  Sign engine_sign = Sign::Ambig;
  std::size_t trials_run = 0;
  std::vector<TrialRecord> records;
  std::vector<OracleViolation> violations;
  /// For an unknown engine answer: how many trials would have supported
  /// each definite sign.
  std::map<Sign, std::size_t> support;

  bool sound() const { return violations.empty(); }
  bool vacuous() const { return engine_sign == Sign::Ambig; }
};

OracleVerdict soundness_report(const Network& net, const InfluenceQuery& q,
                               const OracleConfig& cfg);
OracleVerdict soundness_report(const Network& net, const SynergyQuery& q,
                               const OracleConfig& cfg);

/// Seed used for a given trial.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

}  // namespace qpn
