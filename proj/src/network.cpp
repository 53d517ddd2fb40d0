#include "qpn/network.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

#include "qpn/errors.hpp"

namespace qpn {

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::Deterministic ? "det" : "prob";
}

SynergyKey::SynergyKey(std::string a, std::string b, std::string c)
    : first(std::move(a)), second(std::move(b)), child(std::move(c)) {
  if (second < first) std::swap(first, second);
}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
  };
  if (!alpha(name.front())) return false;
  return std::all_of(name.begin() + 1, name.end(), [&](char ch) {
    return alpha(ch) || (ch >= '0' && ch <= '9');
  });
}

NodeInfo& Network::info(const std::string& name) {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw ValidationError("unknown node '" + name + "'");
  return it->second;
}

const NodeInfo& Network::info(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw ValidationError("unknown node '" + name + "'");
  return it->second;
}

void Network::add_node(const std::string& name, NodeKind kind) {
  if (nodes_.count(name))
    throw ValidationError("duplicate node '" + name + "'");
  nodes_[name].kind = kind;
}

void Network::remove_node(const std::string& name) {
  NodeInfo node = info(name);
  for (const auto& p : node.parents) remove_edge(p, name);
  for (const auto& c : node.children) remove_edge(name, c);
  std::erase_if(synergies_, [&](const auto& entry) {
    const SynergyKey& k = entry.first;
    return k.first == name || k.second == name || k.child == name;
  });
  std::erase_if(curvatures_, [&](const auto& entry) {
    return entry.first.parent == name || entry.first.child == name;
  });
  nodes_.erase(name);
}

void Network::set_kind(const std::string& name, NodeKind kind) {
  info(name).kind = kind;
}

void Network::set_edge(const std::string& parent, const std::string& child,
                       Sign sign) {
  set_edge(parent, child, sign, default_strict(kind(child)));
}

void Network::set_edge(const std::string& parent, const std::string& child,
                       Sign sign, bool strict) {
  info(parent);
  info(child);
  if (sign == Sign::Zero) {
    remove_edge(parent, child);
    return;
  }
  // A strict relation must be monotone.
  if (sign == Sign::Ambig) strict = false;
  edges_[EdgeKey{parent, child}] = Influence{sign, strict};
  info(parent).children.insert(child);
  info(child).parents.insert(parent);
}

void Network::remove_edge(const std::string& parent, const std::string& child) {
  if (edges_.erase(EdgeKey{parent, child}) == 0) return;
  info(parent).children.erase(child);
  info(child).parents.erase(parent);
}

void Network::set_synergy(const std::string& a, const std::string& b,
                          const std::string& child, Sign sign) {
  info(a);
  info(b);
  info(child);
  SynergyKey key(a, b, child);
  if (sign == Sign::Ambig)
    synergies_.erase(key);
  else
    synergies_[key] = sign;
}

void Network::set_curvature(const std::string& parent, const std::string& child,
                            Sign sign) {
  info(parent);
  info(child);
  EdgeKey key{parent, child};
  if (sign == Sign::Ambig)
    curvatures_.erase(key);
  else
    curvatures_[key] = sign;
}

bool Network::has_node(const std::string& name) const {
  return nodes_.count(name) != 0;
}

NodeKind Network::kind(const std::string& name) const {
  return info(name).kind;
}

bool Network::is_deterministic(const std::string& name) const {
  return kind(name) == NodeKind::Deterministic;
}

std::optional<Influence> Network::edge(const std::string& parent,
                                       const std::string& child) const {
  auto it = edges_.find(EdgeKey{parent, child});
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

Sign Network::sign(const std::string& parent, const std::string& child) const {
  auto e = edge(parent, child);
  return e ? e->sign : Sign::Zero;
}

bool Network::strict(const std::string& parent,
                     const std::string& child) const {
  auto e = edge(parent, child);
  return e && e->strict;
}

Sign Network::synergy(const std::string& a, const std::string& b,
                      const std::string& child) const {
  const auto& ps = parents(child);
  if (!ps.count(a) || !ps.count(b)) return Sign::Zero;
  auto it = synergies_.find(SynergyKey(a, b, child));
  return it == synergies_.end() ? Sign::Ambig : it->second;
}

Sign Network::curvature(const std::string& parent,
                        const std::string& child) const {
  if (!parents(child).count(parent)) return Sign::Zero;
  auto it = curvatures_.find(EdgeKey{parent, child});
  return it == curvatures_.end() ? Sign::Ambig : it->second;
}

const std::set<std::string>& Network::parents(const std::string& name) const {
  return info(name).parents;
}

const std::set<std::string>& Network::children(const std::string& name) const {
  return info(name).children;
}

std::vector<std::string> Network::node_names() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& [name, _] : nodes_) out.push_back(name);
  return out;
}

std::vector<std::string> Network::topological_order() const {
  std::map<std::string, std::size_t> indegree;
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>>
      ready;
  for (const auto& [name, node] : nodes_) {
    indegree[name] = node.parents.size();
    if (node.parents.empty()) ready.push(name);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string next = ready.top();
    ready.pop();
    order.push_back(next);
    for (const auto& c : nodes_.at(next).children)
      if (--indegree[c] == 0) ready.push(c);
  }
  if (order.size() != nodes_.size())
    throw ValidationError("network contains a directed cycle");
  return order;
}

std::map<std::string, int> Network::depths() const {
  std::map<std::string, int> depth;
  for (const auto& name : topological_order()) {
    int d = 0;
    for (const auto& p : nodes_.at(name).parents) d = std::max(d, depth[p] + 1);
    depth[name] = d;
  }
  return depth;
}

std::vector<std::string> Network::find_path(const std::string& from,
                                            const std::string& to,
                                            bool skip_direct_edge) const {
  info(from);
  info(to);
  std::map<std::string, std::string> came_from;
  std::deque<std::string> frontier{from};
  came_from[from] = from;
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop_front();
    for (const auto& next : nodes_.at(cur).children) {
      if (skip_direct_edge && cur == from && next == to) continue;
      if (came_from.count(next)) continue;
      came_from[next] = cur;
      if (next == to) {
        std::vector<std::string> path{to};
        while (path.back() != from) path.push_back(came_from[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(next);
    }
  }
  return {};
}

std::set<std::string> Network::descendants(const std::string& name) const {
  std::set<std::string> seen;
  std::vector<std::string> stack(info(name).children.begin(),
                                 info(name).children.end());
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const auto& c : nodes_.at(cur).children) stack.push_back(c);
  }
  return seen;
}

void Network::prune_annotations() {
  std::erase_if(synergies_, [&](const auto& entry) {
    const SynergyKey& k = entry.first;
    const auto& ps = nodes_.at(k.child).parents;
    return !ps.count(k.first) || !ps.count(k.second);
  });
  std::erase_if(curvatures_, [&](const auto& entry) {
    const EdgeKey& k = entry.first;
    const NodeInfo& child = nodes_.at(k.child);
    return child.kind != NodeKind::Deterministic || !child.parents.count(k.parent);
  });
}

void Network::forget_synergies_on(const std::string& child) {
  std::erase_if(synergies_,
                [&](const auto& entry) { return entry.first.child == child; });
}

void Network::forget_curvatures_on(const std::string& child) {
  std::erase_if(curvatures_,
                [&](const auto& entry) { return entry.first.child == child; });
}

std::string Network::summary() const {
  std::ostringstream out;
  out << nodes_.size() << " nodes, " << edges_.size() << " edges";
  if (!synergies_.empty()) out << ", " << synergies_.size() << " synergies";
  if (!curvatures_.empty()) out << ", " << curvatures_.size() << " curvatures";
  return out.str();
}

namespace {

std::string edge_label(const EdgeKey& k) { return k.parent + "->" + k.child; }

std::string synergy_label(const SynergyKey& k) {
  return "{" + k.first + "," + k.second + "}->" + k.child;
}

}  // namespace

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  for (const auto& [name, _] : net.nodes())
    if (!is_valid_name(name)) out.push_back({"invalid-name", name});

  for (const auto& [key, inf] : net.edges()) {
    if (key.parent == key.child) out.push_back({"self-loop", edge_label(key)});
    if (inf.sign == Sign::Zero) out.push_back({"zero-edge", edge_label(key)});
  }

  // Cycle detection by Kahn's algorithm; whatever survives lies on or
  // downstream of a cycle.
  std::map<std::string, std::size_t> indegree;
  std::vector<std::string> ready;
  for (const auto& [name, node] : net.nodes()) {
    indegree[name] = node.parents.size();
    if (node.parents.empty()) ready.push_back(name);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::string cur = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& c : net.children(cur))
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (seen != net.node_count()) {
    std::string members;
    for (const auto& [name, deg] : indegree) {
      if (deg == 0) continue;
      if (!members.empty()) members += ",";
      members += name;
    }
    out.push_back({"cycle", members});
  }

  for (const auto& [key, sign] : net.synergies()) {
    if (key.first == key.second)
      out.push_back({"synergy-pair", synergy_label(key)});
    const auto& ps = net.parents(key.child);
    if (!ps.count(key.first) || !ps.count(key.second))
      out.push_back({"synergy-not-parent", synergy_label(key)});
  }
  for (const auto& [key, sign] : net.curvatures()) {
    if (!net.is_deterministic(key.child))
      out.push_back({"curvature-probabilistic-child", edge_label(key)});
    if (!net.parents(key.child).count(key.parent))
      out.push_back({"curvature-not-parent", edge_label(key)});
  }
  return out;
}

}  // namespace qpn
