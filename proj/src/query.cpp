#include "qpn/query.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "qpn/errors.hpp"
#include "qpn/separation.hpp"

namespace qpn {

void check_query(const Network& net, const InfluenceQuery& q) {
  for (const auto* n : {&q.source, &q.target})
    if (!net.has_node(*n)) throw PreconditionError("unknown node '" + *n + "'");
  for (const auto& g : q.given)
    if (!net.has_node(g)) throw PreconditionError("unknown node '" + g + "'");
  if (q.source == q.target)
    throw PreconditionError("source and target must differ");
  if (q.given.count(q.source) || q.given.count(q.target))
    throw PreconditionError("source and target may not be given");
}

namespace {

std::set<std::string> protected_nodes(const InfluenceQuery& q) {
  std::set<std::string> p = q.given;
  p.insert(q.source);
  p.insert(q.target);
  return p;
}

std::string shallowest_successor(const Network& net, const std::string& c) {
  auto depth = net.depths();
  std::string pick;
  for (const auto& d : net.children(c))
    if (pick.empty() || depth[d] < depth[pick]) pick = d;
  return pick;
}

// Unprotected probabilistic nodes with several successors, in the order the
// planner considers them.
std::vector<std::string> reversal_candidates(
    const Network& net, const std::set<std::string>& protect) {
  auto order = net.topological_order();
  std::reverse(order.begin(), order.end());
  std::vector<std::string> out;
  for (const auto& n : order)
    if (!protect.count(n) && !net.is_deterministic(n) &&
        net.children(n).size() > 1)
      out.push_back(n);
  return out;
}

// A given deterministic successor reached by a strict arc that can be
// reversed. Reversing it first exposes that c is pinned down by the evidence,
// which propagation alone would lose. A parentless deterministic c is a
// constant, which propagation already handles exactly.
std::optional<std::string> invertible_given_successor(
    const Network& net, const std::string& c,
    const std::set<std::string>& given) {
  if (net.parents(c).empty()) return std::nullopt;
  for (const auto& d : net.children(c))
    if (given.count(d) && net.is_deterministic(d) && net.strict(c, d) &&
        net.find_path(c, d, true).empty())
      return d;
  return std::nullopt;
}

std::optional<TransformOp> next_op(const Network& net,
                                   const std::set<std::string>& protect,
                                   const std::set<std::string>& given,
                                   const std::string& target) {
  for (const auto& [name, node] : net.nodes())
    if (!protect.count(name) && node.children.empty())
      return TransformOp::remove_barren(name);

  auto order = net.topological_order();
  std::reverse(order.begin(), order.end());
  for (const auto& n : order)
    if (!protect.count(n) && net.is_deterministic(n)) {
      if (auto d = invertible_given_successor(net, n, given))
        return TransformOp::reverse(n, *d);
      return TransformOp::propagate(n);
    }
  for (const auto& n : order)
    if (!protect.count(n) && net.children(n).size() == 1)
      return TransformOp::reduce(n);
  auto cands = reversal_candidates(net, protect);
  if (!cands.empty())
    return TransformOp::reverse(cands.front(),
                                shallowest_successor(net, cands.front()));

  if (!net.children(target).empty()) {
    if (net.is_deterministic(target)) {
      if (auto d = invertible_given_successor(net, target, given))
        return TransformOp::reverse(target, *d);
      return TransformOp::propagate(target);
    }
    return TransformOp::reverse(target, shallowest_successor(net, target));
  }
  return std::nullopt;
}

// Runs the planner from `start`, executing each operation through the
// checked entry points.
QueryResult execute(const Network& start, const InfluenceQuery& q,
                    std::optional<TransformOp> first = std::nullopt) {
  QueryResult out;
  out.query = q;
  out.final_net = start;
  const auto protect = protected_nodes(q);
  auto run = [&](const TransformOp& op) {
    switch (op.kind) {
      case OpKind::Reverse: {
        auto r = reverse_arc(out.final_net, op.node, op.target);
        out.final_net = std::move(r.net);
        out.trace.steps.push_back(std::move(r.step));
        break;
      }
      case OpKind::Propagate: {
        auto r = propagate_deterministic(out.final_net, op.node);
        out.final_net = std::move(r.net);
        out.trace.steps.push_back(std::move(r.step));
        break;
      }
      case OpKind::RemoveBarren: {
        auto r = remove_barren(out.final_net, op.node);
        out.final_net = std::move(r.net);
        out.trace.steps.push_back(std::move(r.step));
        break;
      }
      case OpKind::Reduce: {
        auto r = reduce_node(out.final_net, op.node);
        out.final_net = std::move(r.net);
        out.trace.append(std::move(r.trace));
        break;
      }
    }
  };
  if (first) run(*first);
  while (auto op = next_op(out.final_net, protect, q.given, q.target)) run(*op);
  out.sign = out.final_net.sign(q.source, q.target);
  return out;
}

// Alternatives to a reversal chosen by the planner: any other legal arc out
// of any reversal candidate.
std::vector<TransformOp> reversal_alternatives(
    const Network& net, const std::set<std::string>& protect,
    const TransformOp& chosen) {
  std::vector<std::string> sources = reversal_candidates(net, protect);
  if (sources.empty()) sources.push_back(chosen.node);
  std::vector<TransformOp> out;
  for (const auto& c : sources)
    for (const auto& d : net.children(c)) {
      auto op = TransformOp::reverse(c, d);
      if (op.same_operation(chosen)) continue;
      if (!net.find_path(c, d, true).empty()) continue;
      out.push_back(op);
    }
  return out;
}

}  // namespace

std::vector<TransformOp> plan(const Network& net, const InfluenceQuery& q) {
  check_query(net, q);
  std::vector<TransformOp> ops;
  const auto protect = protected_nodes(q);
  Network cur = net;
  while (auto op = next_op(cur, protect, q.given, q.target)) {
    cur = apply(cur, *op);
    ops.push_back(*op);
  }
  return ops;
}

QueryResult qualitative_influence(const Network& net, const InfluenceQuery& q,
                                  const QueryOptions& opts) {
  check_query(net, q);
  const auto ops = plan(net, q);
  QueryResult out;
  out.query = q;
  out.final_net = net;
  for (const auto& op : ops) {
    if (op.kind == OpKind::Reduce) {
      auto r = reduce_node(out.final_net, op.node);
      out.final_net = std::move(r.net);
      out.trace.append(std::move(r.trace));
    } else {
      StepResult r = op.kind == OpKind::Reverse
                         ? reverse_arc(out.final_net, op.node, op.target)
                     : op.kind == OpKind::Propagate
                         ? propagate_deterministic(out.final_net, op.node)
                         : remove_barren(out.final_net, op.node);
      out.final_net = std::move(r.net);
      out.trace.steps.push_back(std::move(r.step));
    }
  }
  out.sign = out.final_net.sign(q.source, q.target);

  // Independence the transformations cannot see: D-separation, or a query
  // node whose value the evidence pins down.
  if (out.sign != Sign::Zero) {
    std::string why;
    if (D_separated(net, {q.source, q.target, q.given})) {
      why = q.source + " and " + q.target + " are D-separated";
    } else {
      auto fixed = determined_closure(net, q.given);
      for (const auto* n : {&q.source, &q.target})
        if (fixed.count(*n) && why.empty())
          why = *n + " is determined by the given nodes";
    }
    if (!why.empty()) {
      out.notes.push_back(why + "; " + std::string(to_string(out.sign)) +
                          " refined to 0");
      out.final_net.remove_edge(q.source, q.target);
      out.sign = Sign::Zero;
    }
  }

  if (opts.lookahead && out.sign != Sign::Zero) {
    const auto protect = protected_nodes(q);
    Network cur = net;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (ops[i].kind == OpKind::Reverse) {
        for (const auto& alt : reversal_alternatives(cur, protect, ops[i])) {
          QueryResult other = execute(cur, q, alt);
          if (strictly_more_informative(other.sign, out.sign)) {
            out.notes.push_back(
                "ordering mattered: " + alt.to_string() + " instead of " +
                ops[i].to_string() + " at step " + std::to_string(i + 1) +
                " yields " + std::string(to_string(other.sign)));
          }
        }
      }
      cur = apply(cur, ops[i]);
    }
  }
  return out;
}

std::string explain(const QueryResult& result) {
  std::ostringstream out;
  const auto& q = result.query;
  out << "query: influence of " << q.source << " on " << q.target;
  if (!q.given.empty()) {
    out << " given {";
    bool first = true;
    for (const auto& g : q.given) {
      out << (first ? "" : ",") << g;
      first = false;
    }
    out << "}";
  }
  out << "\n";
  if (result.trace.steps.empty()) out << "network already minimal\n";
  int i = 0;
  for (const auto& step : result.trace.steps) out << describe(step, ++i);
  for (const auto& note : result.notes) out << "note: " << note << "\n";
  out << "result: δ[" << q.source << "," << q.target
      << "] = " << to_string(result.sign) << "\n";
  return out.str();
}

}  // namespace qpn
