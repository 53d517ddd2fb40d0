#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpn/network.hpp"

namespace qpn {

enum class OpKind { Reverse, Propagate, RemoveBarren, Reduce };

/// Row of the arc-reversal table that was applied.
enum class ReversalCase { I, II, III, IV, V };

std::string_view to_string(ReversalCase rc);

struct TransformOp {
  OpKind kind = OpKind::RemoveBarren;
  std::string node;    // c
  std::string target;  // d, reversals only
  std::optional<ReversalCase> applied_case;

  static TransformOp reverse(std::string c, std::string d);
  static TransformOp propagate(std::string c);
  static TransformOp remove_barren(std::string c);
  static TransformOp reduce(std::string c);

  /// "REVERSE(c,d)", "DNP(c)", "REMOVE_BARREN(c)" or "REDUCE(c)".
  std::string to_string() const;

  /// Compares the operation itself; the case tag is an outcome, not input.
  bool same_operation(const TransformOp& other) const {
    return kind == other.kind && node == other.node && target == other.target;
  }
};

/// One changed sign, with the rule that produced it rendered with both the
/// symbolic operands and their values.
struct SignUpdate {
  std::string target;  // "a->d" or "{a,b}->d"
  Sign before = Sign::Zero;
  Sign after = Sign::Zero;
  std::string formula;
};

struct TraceStep {
  TransformOp op;
  std::string before;
  std::string after;
  std::vector<SignUpdate> updates;
  std::vector<std::string> notes;
};

/// Ordered record of the transformations applied to a network. Replaying the
/// operations from the initial network reproduces the final one.
struct Trace {
  std::vector<TraceStep> steps;
  /// Steps were produced by the synergy-aware reduction rules.
  bool synergy_aware = false;

  void append(Trace other);
  std::vector<TransformOp> ops() const;
};

/// "step N: OP, case X (before -> after)" followed by one indented line per
/// sign update and note.
std::string describe(const TraceStep& step, int number);

struct StepResult {
  Network net;
  TraceStep step;
};

struct TransformResult {
  Network net;
  Trace trace;
};

/// Signs produced by one row of the reversal table for the fragment
/// a -> c -> d, a -> d. `dc` is the reversed arc, `ac` and `ad` the updated
/// links from a. Case III reports the deterministic-propagation result and a
/// zero reversed arc.
struct ReversalSigns {
  Sign dc;
  Sign ac;
  Sign ad;
};

ReversalSigns reversal_signs(ReversalCase rc, Sign cd, Sign ac, Sign ad);

/// Which table row reverse_arc() would use for c -> d.
ReversalCase classify_reversal(const Network& net, const std::string& c,
                               const std::string& d);

/// Deletes the arcs out of deterministic `c`, rewiring every parent a of c to
/// every former successor d with sign d(a,d) + d(a,c) * d(c,d). Kinds are
/// unchanged. Synergies on the former successors become unknown.
StepResult propagate_deterministic(const Network& net, const std::string& c);

/// Reverses c -> d per the reversal table. Deterministic-d rows require a
/// strict monotone c -> d and fall back to the probabilistic row otherwise.
/// Synergy and curvature entries on c and d become unknown.
StepResult reverse_arc(const Network& net, const std::string& c,
                       const std::string& d);

StepResult remove_barren(const Network& net, const std::string& c);

/// Splices `c` out. Deterministic nodes go through propagation and barren
/// removal; probabilistic nodes with several successors are first reversed
/// down to one successor, lowest-depth successor first.
TransformResult reduce_node(const Network& net, const std::string& c);

/// Applies one operation. With `synergy_aware` the reduction steps also
/// carry synergies forward.
Network apply(const Network& net, const TransformOp& op,
              bool synergy_aware = false);
Network replay(const Network& initial, const Trace& trace);

}  // namespace qpn
