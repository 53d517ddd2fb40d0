#include "qpn/separation.hpp"

#include <map>
#include <vector>

#include "qpn/errors.hpp"

namespace qpn {

void check_query(const Network& net, const SeparationQuery& q) {
  for (const auto* n : {&q.x, &q.y})
    if (!net.has_node(*n)) throw PreconditionError("unknown node '" + *n + "'");
  for (const auto& g : q.given)
    if (!net.has_node(g)) throw PreconditionError("unknown node '" + g + "'");
  if (q.x == q.y)
    throw PreconditionError("separation query needs two distinct nodes");
  if (q.given.count(q.x) || q.given.count(q.y))
    throw PreconditionError("query nodes may not appear in the given set");
}

std::set<std::string> functional_closure(const Network& net,
                                         const std::set<std::string>& given) {
  for (const auto& g : given)
    if (!net.has_node(g)) throw PreconditionError("unknown node '" + g + "'");
  std::set<std::string> closed = given;
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [name, node] : net.nodes()) {
      if (node.kind != NodeKind::Deterministic || closed.count(name)) continue;
      bool determined = true;
      for (const auto& p : node.parents)
        if (!closed.count(p)) {
          determined = false;
          break;
        }
      if (determined) {
        closed.insert(name);
        grew = true;
      }
    }
  }
  return closed;
}

namespace {

// Nodes reachable from `source` by an active trail given `observed`.
std::set<std::string> reachable(const Network& net, const std::string& source,
                                const std::set<std::string>& observed) {
  // Observed nodes and their ancestors; a collider is open iff it is here.
  std::set<std::string> ancestors;
  std::vector<std::string> stack(observed.begin(), observed.end());
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (!ancestors.insert(cur).second) continue;
    for (const auto& p : net.parents(cur)) stack.push_back(p);
  }

  enum Dir { kUp, kDown };  // kUp: arrived from a child; kDown: from a parent
  std::set<std::pair<std::string, Dir>> visited;
  std::set<std::string> result;
  std::vector<std::pair<std::string, Dir>> todo{{source, kUp}};
  while (!todo.empty()) {
    auto [node, dir] = todo.back();
    todo.pop_back();
    if (!visited.insert({node, dir}).second) continue;
    bool is_observed = observed.count(node) != 0;
    if (!is_observed) result.insert(node);
    if (dir == kUp && !is_observed) {
      for (const auto& p : net.parents(node)) todo.push_back({p, kUp});
      for (const auto& c : net.children(node)) todo.push_back({c, kDown});
    } else if (dir == kDown) {
      if (!is_observed)
        for (const auto& c : net.children(node)) todo.push_back({c, kDown});
      if (ancestors.count(node))
        for (const auto& p : net.parents(node)) todo.push_back({p, kUp});
    }
  }
  return result;
}

}  // namespace

namespace {

// Monotone sign of det node d in p once S is fixed, composing through the
// nodes that S and p determine. Strict only if every term is.
std::pair<Sign, bool> composed_sign(const Network& net,
                                    const std::set<std::string>& s,
                                    const std::string& p,
                                    const std::string& d) {
  auto with_p = s;
  with_p.insert(p);
  auto inner = functional_closure(net, with_p);
  for (const auto& q : net.parents(d))
    if (!inner.count(q)) return {Sign::Ambig, false};
  std::map<std::string, std::pair<Sign, bool>> val{{p, {Sign::Plus, true}}};
  for (const auto& x : net.topological_order()) {
    if (x == p || (x != d && (s.count(x) || !inner.count(x)))) continue;
    Sign acc = Sign::Zero;
    bool strict = true, any = false;
    for (const auto& y : net.parents(x)) {
      auto it = val.find(y);
      if (it == val.end()) continue;
      Sign term = it->second.first * net.sign(y, x);
      if (term == Sign::Zero) continue;
      any = true;
      acc = acc + term;
      strict = strict && it->second.second && net.strict(y, x);
    }
    if (any) val[x] = {acc, strict};
    if (x == d) break;
  }
  auto it = val.find(d);
  if (it == val.end()) return {Sign::Zero, false};
  return it->second;
}

std::set<std::string> ancestors(const Network& net, const std::string& n) {
  std::set<std::string> seen;
  std::vector<std::string> stack{n};
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    for (const auto& p : net.parents(x))
      if (seen.insert(p).second) stack.push_back(p);
  }
  return seen;
}

}  // namespace

std::set<std::string> determined_closure(const Network& net,
                                         const std::set<std::string>& given) {
  std::set<std::string> s = functional_closure(net, given);
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& d : std::set<std::string>(s)) {
      if (!net.is_deterministic(d)) continue;
      for (const auto& p : ancestors(net, d)) {
        if (s.count(p)) continue;
        auto [sign, strict] = composed_sign(net, s, p, d);
        if (strict && (sign == Sign::Plus || sign == Sign::Minus)) {
          s.insert(p);
          grew = true;
          break;
        }
      }
      if (grew) break;
    }
    if (grew) s = functional_closure(net, s);
  }
  return s;
}

bool d_separated(const Network& net, const SeparationQuery& q) {
  check_query(net, q);
  return reachable(net, q.x, q.given).count(q.y) == 0;
}

bool D_separated(const Network& net, const SeparationQuery& q) {
  check_query(net, q);
  auto closed = functional_closure(net, q.given);
  if (closed.count(q.x) || closed.count(q.y)) return true;
  return reachable(net, q.x, closed).count(q.y) == 0;
}

}  // namespace qpn
