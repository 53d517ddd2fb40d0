#include "qpn/transforms.hpp"

#include <algorithm>
#include <sstream>

#include "qpn/errors.hpp"
#include "qpn/synergy.hpp"
#include "transforms_detail.hpp"

namespace qpn {

std::string_view to_string(ReversalCase rc) {
  switch (rc) {
    case ReversalCase::I:
      return "I";
    case ReversalCase::II:
      return "II";
    case ReversalCase::III:
      return "III";
    case ReversalCase::IV:
      return "IV";
    case ReversalCase::V:
      return "V";
  }
  return "?";
}

TransformOp TransformOp::reverse(std::string c, std::string d) {
  return {OpKind::Reverse, std::move(c), std::move(d), std::nullopt};
}
TransformOp TransformOp::propagate(std::string c) {
  return {OpKind::Propagate, std::move(c), {}, std::nullopt};
}
TransformOp TransformOp::remove_barren(std::string c) {
  return {OpKind::RemoveBarren, std::move(c), {}, std::nullopt};
}
TransformOp TransformOp::reduce(std::string c) {
  return {OpKind::Reduce, std::move(c), {}, std::nullopt};
}

std::string TransformOp::to_string() const {
  switch (kind) {
    case OpKind::Reverse:
      return "REVERSE(" + node + "," + target + ")";
    case OpKind::Propagate:
      return "DNP(" + node + ")";
    case OpKind::RemoveBarren:
      return "REMOVE_BARREN(" + node + ")";
    case OpKind::Reduce:
      return "REDUCE(" + node + ")";
  }
  return "?";
}

void Trace::append(Trace other) {
  for (auto& s : other.steps) steps.push_back(std::move(s));
}

std::vector<TransformOp> Trace::ops() const {
  std::vector<TransformOp> out;
  for (const auto& s : steps) out.push_back(s.op);
  return out;
}

ReversalSigns reversal_signs(ReversalCase rc, Sign cd, Sign ac, Sign ad) {
  switch (rc) {
    case ReversalCase::I:
      return {cd, -(cd * ad), ad + (ac * cd)};
    case ReversalCase::II:
      return {cd, -(cd * ad), Sign::Zero};
    case ReversalCase::III:
      return {Sign::Zero, ac, ad + (ac * cd)};
    case ReversalCase::IV:
      return {cd, -(cd * ad), ad + (ac * cd)};
    case ReversalCase::V:
      return {cd, ac + (ad * Sign::Ambig), ad + (ac * cd)};
  }
  return {Sign::Ambig, Sign::Ambig, Sign::Ambig};
}

namespace detail {

std::string edge_name(const std::string& from, const std::string& to) {
  return from + "->" + to;
}

}  // namespace detail

namespace {

using detail::edge_name;

std::string s(Sign x) { return std::string(to_string(x)); }

std::string delta(const std::string& a, const std::string& b) {
  return "δ[" + a + "," + b + "]";
}

// δ′[a,d] = δ[a,d] ⊕ (δ[a,c] ⊗ δ[c,d]) = v ⊕ (v ⊗ v) = r
std::string chain_formula(const std::string& a, const std::string& c,
                          const std::string& d, Sign ad, Sign ac, Sign cd,
                          Sign result) {
  return "δ′[" + a + "," + d + "] = " + delta(a, d) + " ⊕ (" + delta(a, c) +
         " ⊗ " + delta(c, d) + ") = " + s(ad) + " ⊕ (" + s(ac) + " ⊗ " +
         s(cd) + ") = " + s(result);
}

// Strictness of d(a,d) + d(a,c) * d(c,d): every contributing term must be
// strict and the result monotone.
bool chain_strict(const Network& net, const std::string& a,
                  const std::string& c, const std::string& d, Sign result) {
  if (result != Sign::Plus && result != Sign::Minus) return false;
  bool strict = true;
  if (net.edge(a, d)) strict = strict && net.strict(a, d);
  if (net.edge(a, c) && net.edge(c, d))
    strict = strict && net.strict(a, c) && net.strict(c, d);
  return strict;
}

void require_node(const Network& net, const std::string& n) {
  if (!net.has_node(n)) throw PreconditionError("unknown node '" + n + "'");
}

// Parents of c and d other than c itself, in order.
std::vector<std::string> fragment_parents(const Network& net,
                                          const std::string& c,
                                          const std::string& d) {
  std::set<std::string> all = net.parents(c);
  for (const auto& p : net.parents(d))
    if (p != c) all.insert(p);
  return {all.begin(), all.end()};
}

}  // namespace

ReversalCase classify_reversal(const Network& net, const std::string& c,
                               const std::string& d) {
  require_node(net, c);
  require_node(net, d);
  auto inf = net.edge(c, d);
  if (!inf)
    throw PreconditionError("no edge " + edge_name(c, d) + " to reverse");
  bool c_det = net.is_deterministic(c);
  bool d_det = net.is_deterministic(d);
  bool invertible =
      inf->strict && (inf->sign == Sign::Plus || inf->sign == Sign::Minus);
  if (c_det && !d_det) return ReversalCase::III;
  if (d_det && invertible) {
    if (!c_det) return ReversalCase::IV;
    return net.parents(c).empty() ? ReversalCase::II : ReversalCase::I;
  }
  return ReversalCase::V;
}

namespace detail {

StepResult propagate(const Network& net, const std::string& c,
                     bool with_synergy) {
  require_node(net, c);
  if (!net.is_deterministic(c))
    throw PreconditionError("deterministic node propagation needs a "
                            "deterministic node; '" + c + "' is probabilistic");
  const auto successors = net.children(c);
  if (successors.empty())
    throw PreconditionError("'" + c + "' is barren; remove it instead");

  StepResult out{net, {}};
  out.step.op = TransformOp::propagate(c);
  out.step.before = net.summary();
  Network& res = out.net;

  std::vector<std::pair<SynergyKey, SignUpdate>> synergy_updates;
  for (const auto& d : successors) {
    if (with_synergy) {
      auto ups = synergy_after_splice(net, c, d);
      synergy_updates.insert(synergy_updates.end(), ups.begin(), ups.end());
    }
    Sign cd = net.sign(c, d);
    for (const auto& a : net.parents(c)) {
      Sign ad = net.sign(a, d);
      Sign ac = net.sign(a, c);
      Sign result = ad + (ac * cd);
      res.set_edge(a, d, result, chain_strict(net, a, c, d, result));
      out.step.updates.push_back({edge_name(a, d), ad, result,
                                  chain_formula(a, c, d, ad, ac, cd, result)});
    }
    res.remove_edge(c, d);
    res.forget_synergies_on(d);
    // d's dependence on c's parents changed shape; curvature in them is lost.
    for (const auto& a : net.parents(c)) res.set_curvature(a, d, Sign::Ambig);
    res.set_curvature(c, d, Sign::Ambig);
  }
  for (const auto& [key, up] : synergy_updates) {
    res.set_synergy(key.first, key.second, key.child, up.after);
    out.step.updates.push_back(up);
  }
  res.prune_annotations();
  out.step.after = res.summary();
  return out;
}

StepResult splice_single_successor(const Network& net, const std::string& c,
                                   bool with_synergy) {
  require_node(net, c);
  const auto& succ = net.children(c);
  if (succ.size() != 1)
    throw PreconditionError("'" + c + "' must have exactly one successor");
  const std::string d = *succ.begin();

  StepResult out{net, {}};
  out.step.op = TransformOp::reduce(c);
  out.step.before = net.summary();
  Network& res = out.net;

  std::vector<std::pair<SynergyKey, SignUpdate>> synergy_updates;
  if (with_synergy) synergy_updates = synergy_after_splice(net, c, d);

  Sign cd = net.sign(c, d);
  for (const auto& a : net.parents(c)) {
    Sign ad = net.sign(a, d);
    Sign ac = net.sign(a, c);
    Sign result = ad + (ac * cd);
    res.set_edge(a, d, result, chain_strict(net, a, c, d, result));
    out.step.updates.push_back(
        {edge_name(a, d), ad, result, chain_formula(a, c, d, ad, ac, cd, result)});
  }
  res.remove_node(c);
  res.forget_synergies_on(d);
  if (!net.is_deterministic(c) && net.is_deterministic(d)) {
    res.set_kind(d, NodeKind::Probabilistic);
    out.step.notes.push_back(d + " becomes probabilistic");
  }
  if (!res.is_deterministic(d)) res.forget_curvatures_on(d);
  for (const auto& [key, up] : synergy_updates) {
    res.set_synergy(key.first, key.second, key.child, up.after);
    out.step.updates.push_back(up);
  }
  res.prune_annotations();
  out.step.after = res.summary();
  return out;
}

TransformResult reduce(const Network& net, const std::string& c,
                       bool with_synergy) {
  require_node(net, c);
  TransformResult out{net, {}};
  out.trace.synergy_aware = with_synergy;
  auto push = [&](StepResult r) {
    out.net = std::move(r.net);
    out.trace.steps.push_back(std::move(r.step));
  };

  while (true) {
    const auto& succ = out.net.children(c);
    if (succ.empty()) {
      push(remove_barren(out.net, c));
      return out;
    }
    if (out.net.is_deterministic(c)) {
      push(propagate(out.net, c, with_synergy));
      continue;
    }
    if (succ.size() == 1) {
      push(splice_single_successor(out.net, c, with_synergy));
      return out;
    }
    // Probabilistic with several successors: reverse the shallowest arc out
    // of c. No other path c ~> d can exist, since it would run through a
    // shallower successor.
    auto depth = out.net.depths();
    std::string pick;
    for (const auto& d : succ)
      if (pick.empty() || depth[d] < depth[pick]) pick = d;
    auto path = out.net.find_path(c, pick, true);
    if (!path.empty()) {
      std::string shown;
      for (const auto& n : path) shown += (shown.empty() ? "" : " -> ") + n;
      throw PreconditionError("reducing '" + c + "' needs reversal of " +
                              edge_name(c, pick) +
                              ", which would close the cycle " + shown);
    }
    push(reverse_arc(out.net, c, pick));
  }
}

}  // namespace detail

StepResult propagate_deterministic(const Network& net, const std::string& c) {
  return detail::propagate(net, c, false);
}

StepResult reverse_arc(const Network& net, const std::string& c,
                       const std::string& d) {
  require_node(net, c);
  require_node(net, d);
  auto inf = net.edge(c, d);
  if (!inf)
    throw PreconditionError("no edge " + edge_name(c, d) + " to reverse");
  auto other = net.find_path(c, d, true);
  if (!other.empty()) {
    std::string shown;
    for (const auto& n : other) shown += (shown.empty() ? "" : " -> ") + n;
    throw PreconditionError("cannot reverse " + edge_name(c, d) +
                            ": another directed path exists (" + shown + ")");
  }

  const ReversalCase rc = classify_reversal(net, c, d);
  if (rc == ReversalCase::III) {
    StepResult out = detail::propagate(net, c, false);
    out.step.op = TransformOp::reverse(c, d);
    out.step.op.applied_case = rc;
    out.step.notes.insert(out.step.notes.begin(),
                          "case III: deterministic " + c + " into probabilistic " +
                              d + ", delegated to deterministic node propagation");
    return out;
  }

  const bool c_det = net.is_deterministic(c);
  const bool d_det = net.is_deterministic(d);
  const Sign cd = inf->sign;

  StepResult out{net, {}};
  out.step.op = TransformOp::reverse(c, d);
  out.step.op.applied_case = rc;
  out.step.before = net.summary();
  Network& res = out.net;
  res.remove_edge(c, d);

  const bool invertible_rows = rc != ReversalCase::V;
  for (const auto& a : fragment_parents(net, c, d)) {
    Sign ac = net.sign(a, c);
    Sign ad = net.sign(a, d);
    ReversalSigns r = reversal_signs(rc, cd, ac, ad);

    std::string f_ac;
    bool strict_ac = false;
    if (invertible_rows) {
      f_ac = "δ′[" + a + "," + c + "] = ⊖(" + delta(c, d) + " ⊗ " + delta(a, d) +
             ") = ⊖(" + s(cd) + " ⊗ " + s(ad) + ") = " + s(r.ac);
      strict_ac = (r.ac == Sign::Plus || r.ac == Sign::Minus) && net.strict(a, d);
    } else {
      f_ac = "δ′[" + a + "," + c + "] = " + delta(a, c) + " ⊕ (" + delta(a, d) +
             " ⊗ ?) = " + s(ac) + " ⊕ (" + s(ad) + " ⊗ ?) = " + s(r.ac);
    }
    res.set_edge(a, c, r.ac, strict_ac);
    out.step.updates.push_back({edge_name(a, c), ac, r.ac, f_ac});

    std::string f_ad = rc == ReversalCase::II
                           ? "δ′[" + a + "," + d + "] = 0"
                           : chain_formula(a, c, d, ad, ac, cd, r.ad);
    res.set_edge(a, d, r.ad, chain_strict(net, a, c, d, r.ad));
    out.step.updates.push_back({edge_name(a, d), ad, r.ad, f_ad});
  }
  res.set_edge(d, c, cd, invertible_rows);
  out.step.updates.push_back({edge_name(d, c), Sign::Zero, cd,
                              "δ′[" + d + "," + c + "] = " + delta(c, d) +
                                  " = " + s(cd)});

  if (rc == ReversalCase::IV) {
    res.set_kind(c, NodeKind::Deterministic);
    res.set_kind(d, NodeKind::Probabilistic);
    out.step.notes.push_back(c + " becomes deterministic, " + d +
                             " becomes probabilistic");
    for (const auto& p : res.parents(d)) {
      auto e = *res.edge(p, d);
      res.set_edge(p, d, e.sign, false);
    }
  } else if (rc == ReversalCase::V && d_det) {
    out.step.notes.push_back(edge_name(c, d) +
                             " is not strict and monotone; reversed as if " + d +
                             " were probabilistic");
    if (c_det) {
      res.set_kind(c, NodeKind::Probabilistic);
      out.step.notes.push_back(c + " becomes probabilistic");
    } else {
      res.set_kind(d, NodeKind::Probabilistic);
      out.step.notes.push_back(d + " becomes probabilistic");
    }
  }

  res.forget_synergies_on(c);
  res.forget_synergies_on(d);
  res.forget_curvatures_on(c);
  res.forget_curvatures_on(d);
  res.prune_annotations();
  out.step.after = res.summary();
  return out;
}

StepResult remove_barren(const Network& net, const std::string& c) {
  require_node(net, c);
  if (!net.children(c).empty())
    throw PreconditionError("'" + c + "' has successors and is not barren");
  StepResult out{net, {}};
  out.step.op = TransformOp::remove_barren(c);
  out.step.before = net.summary();
  out.net.remove_node(c);
  out.step.after = out.net.summary();
  return out;
}

TransformResult reduce_node(const Network& net, const std::string& c) {
  return detail::reduce(net, c, false);
}

Network apply(const Network& net, const TransformOp& op, bool synergy_aware) {
  switch (op.kind) {
    case OpKind::Reverse:
      return reverse_arc(net, op.node, op.target).net;
    case OpKind::Propagate:
      return detail::propagate(net, op.node, synergy_aware).net;
    case OpKind::RemoveBarren:
      return remove_barren(net, op.node).net;
    case OpKind::Reduce:
      return detail::reduce(net, op.node, synergy_aware).net;
  }
  return net;
}

Network replay(const Network& initial, const Trace& trace) {
  Network net = initial;
  for (const auto& step : trace.steps)
    net = apply(net, step.op, trace.synergy_aware);
  return net;
}

std::string describe(const TraceStep& step, int number) {
  std::ostringstream out;
  out << "step " << number << ": " << step.op.to_string();
  if (step.op.applied_case) out << ", case " << to_string(*step.op.applied_case);
  out << " (" << step.before << " -> " << step.after << ")\n";
  for (const auto& up : step.updates) out << "    " << up.formula << "\n";
  for (const auto& note : step.notes) out << "    note: " << note << "\n";
  return out.str();
}

}  // namespace qpn
