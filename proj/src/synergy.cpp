#include "qpn/synergy.hpp"

#include <algorithm>

#include "qpn/errors.hpp"
#include "transforms_detail.hpp"

namespace qpn {

namespace {

std::string s(Sign x) { return std::string(to_string(x)); }

std::string syn(const std::string& a, const std::string& b,
                const std::string& child) {
  return "δ{" + a + "," + b + "}[" + child + "]";
}

std::string inf(const std::string& a, const std::string& b) {
  return "δ[" + a + "," + b + "]";
}

}  // namespace

std::vector<std::pair<SynergyKey, SignUpdate>> synergy_after_splice(
    const Network& before, const std::string& c, const std::string& d) {
  std::set<std::string> new_parents = before.parents(d);
  new_parents.erase(c);
  for (const auto& p : before.parents(c)) new_parents.insert(p);

  const bool second_order = before.is_deterministic(c);
  // Curvature exists only for deterministic children.
  const Sign kappa = before.is_deterministic(d) ? before.curvature(c, d)
                                                : Sign::Ambig;
  const Sign cd = before.sign(c, d);

  std::vector<std::pair<SynergyKey, SignUpdate>> out;
  std::vector<std::string> ps(new_parents.begin(), new_parents.end());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      const std::string& a = ps[i];
      const std::string& b = ps[j];
      Sign t1 = before.synergy(a, b, d);
      Sign abc = before.synergy(a, b, c);
      Sign bc = before.sign(b, c);
      Sign acd = before.synergy(a, c, d);
      Sign ac = before.sign(a, c);
      Sign bcd = before.synergy(b, c, d);
      Sign result = t1 + (abc * cd) + (bc * acd) + (ac * bcd);

      std::string symbolic = syn(a, b, d) + " ⊕ (" + syn(a, b, c) + " ⊗ " +
                             inf(c, d) + ") ⊕ (" + inf(b, c) + " ⊗ " +
                             syn(a, c, d) + ") ⊕ (" + inf(a, c) + " ⊗ " +
                             syn(b, c, d) + ")";
      std::string values = s(t1) + " ⊕ (" + s(abc) + " ⊗ " + s(cd) + ") ⊕ (" +
                           s(bc) + " ⊗ " + s(acd) + ") ⊕ (" + s(ac) + " ⊗ " +
                           s(bcd) + ")";
      if (second_order) {
        result = result + (ac * bc * kappa);
        symbolic += " ⊕ (" + inf(a, c) + " ⊗ " + inf(b, c) + " ⊗ κ[" + c + "," +
                    d + "])";
        values += " ⊕ (" + s(ac) + " ⊗ " + s(bc) + " ⊗ " + s(kappa) + ")";
      }
      SynergyKey key(a, b, d);
      SignUpdate up;
      up.target = "{" + key.first + "," + key.second + "}->" + d;
      up.before = t1;
      up.after = result;
      up.formula =
          "δ′{" + a + "," + b + "}[" + d + "] = " + symbolic + " = " + values +
          " = " + s(result);
      out.emplace_back(std::move(key), std::move(up));
    }
  }
  return out;
}

TransformResult reduce_with_synergy(const Network& net, const std::string& c) {
  for (const auto& [key, _] : net.curvatures())
    if (!net.is_deterministic(key.child))
      throw PreconditionError("curvature entry " + key.parent + "->" +
                              key.child + " is on a probabilistic node");
  return detail::reduce(net, c, true);
}

namespace {

std::set<std::string> ancestors_of(const Network& net, const std::string& n) {
  std::set<std::string> seen;
  std::vector<std::string> stack(net.parents(n).begin(), net.parents(n).end());
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const auto& p : net.parents(cur)) stack.push_back(p);
  }
  return seen;
}

}  // namespace

SynergyResult qualitative_synergy(const Network& net, const SynergyQuery& q) {
  for (const auto* n : {&q.a, &q.b, &q.child})
    if (!net.has_node(*n)) throw PreconditionError("unknown node '" + *n + "'");
  for (const auto& g : q.given)
    if (!net.has_node(g)) throw PreconditionError("unknown node '" + g + "'");
  if (q.a == q.b || q.a == q.child || q.b == q.child)
    throw PreconditionError("synergy query needs three distinct nodes");
  for (const auto* n : {&q.a, &q.b, &q.child})
    if (q.given.count(*n))
      throw PreconditionError("query node '" + *n + "' may not be given");
  for (const auto* n : {&q.a, &q.b})
    if (net.find_path(*n, q.child).empty())
      throw PreconditionError("'" + *n + "' has no directed path to '" +
                              q.child + "'");

  std::set<std::string> protect = q.given;
  protect.insert({q.a, q.b, q.child});

  SynergyResult out;
  out.final_net = net;
  out.trace.synergy_aware = true;
  Network& cur = out.final_net;

  auto push = [&](TransformResult r) {
    cur = std::move(r.net);
    out.trace.append(std::move(r.trace));
  };

  // Barren nodes outside the query never matter.
  for (bool removed = true; removed;) {
    removed = false;
    for (const auto& name : cur.node_names()) {
      if (protect.count(name) || !cur.children(name).empty()) continue;
      push(reduce_with_synergy(cur, name));
      removed = true;
      break;
    }
  }

  while (true) {
    auto anc = ancestors_of(cur, q.child);
    std::set<std::string> between;
    for (const auto* m : {&q.a, &q.b})
      for (const auto& n : cur.descendants(*m))
        if (anc.count(n) && !protect.count(n)) between.insert(n);
    if (between.empty()) break;

    auto order = cur.topological_order();
    std::reverse(order.begin(), order.end());
    std::string pick;
    for (const auto& n : order)
      if (between.count(n) && cur.is_deterministic(n)) {
        pick = n;
        break;
      }
    if (pick.empty())
      for (const auto& n : order)
        if (between.count(n) && cur.children(n).size() == 1) {
          pick = n;
          break;
        }
    if (pick.empty()) {
      out.sign = Sign::Ambig;
      out.notes.push_back("reducing '" + *between.begin() +
                          "' would need an arc reversal; synergy is not "
                          "carried through reversals");
      return out;
    }
    push(reduce_with_synergy(cur, pick));
  }

  out.sign = cur.synergy(q.a, q.b, q.child);
  for (const auto& p : cur.parents(q.child))
    if (p != q.a && p != q.b) out.context.insert(p);
  return out;
}

}  // namespace qpn
