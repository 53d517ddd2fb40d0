#include "qpn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "qpn/errors.hpp"

namespace qpn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string join_set(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) {
    if (out.size() > 1) out += ",";
    out += x;
  }
  return out + "}";
}

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Mixed-radix helpers over a list of cardinalities, last index fastest.
std::vector<std::size_t> strides_of(const std::vector<int>& cards) {
  std::vector<std::size_t> s(cards.size(), 1);
  for (std::size_t i = cards.size(); i-- > 1;) s[i - 1] = s[i] * cards[i];
  return s;
}

std::size_t product(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int k : cards) n *= static_cast<std::size_t>(k);
  return n;
}

std::vector<int> digits_of(std::size_t row, const std::vector<int>& cards) {
  std::vector<int> d(cards.size(), 0);
  for (std::size_t i = cards.size(); i-- > 0;) {
    d[i] = static_cast<int>(row % cards[i]);
    row /= cards[i];
  }
  return d;
}

std::vector<NumericNode> order_nodes(std::vector<NumericNode> nodes) {
  std::map<std::string, std::size_t> pending;
  std::map<std::string, std::vector<std::string>> kids;
  std::map<std::string, NumericNode> by_name;
  for (auto& n : nodes) {
    pending[n.name] = n.parents.size();
    for (const auto& p : n.parents) kids[p].push_back(n.name);
  }
  for (auto& n : nodes) by_name.emplace(n.name, std::move(n));
  std::set<std::string> ready;
  for (const auto& [name, k] : pending)
    if (k == 0) ready.insert(name);
  std::vector<NumericNode> out;
  while (!ready.empty()) {
    std::string name = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(std::move(by_name.at(name)));
    for (const auto& k : kids[name])
      if (--pending[k] == 0) ready.insert(k);
  }
  if (out.size() != pending.size())
    throw OracleError("numeric network has a cycle");
  return out;
}

std::vector<double> survival(const NumericNode& n, std::size_t row) {
  std::vector<double> s(n.levels.size() > 0 ? n.levels.size() - 1 : 0);
  double acc = 1.0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    acc -= n.prob(row, static_cast<int>(t));
    s[t] = acc;
  }
  return s;
}

class Sampler {
 public:
  Sampler(const Network& net, const OracleConfig& cfg, std::uint64_t seed)
      : net_(net), cfg_(cfg), rng_(seed) {}

  NumericNet run() {
    std::vector<NumericNode> nodes;
    for (const auto& name : net_.topological_order()) {
      NumericNode n = net_.is_deterministic(name) ? deterministic(name)
                                                  : probabilistic(name);
      done_.emplace(name, n);
      nodes.push_back(std::move(n));
    }
    return NumericNet(std::move(nodes));
  }

 private:
  struct Axis {
    std::string name;
    int card = 0;
    std::vector<double> coord;
  };

  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  std::vector<Axis> axes_for(const std::string& name, bool cardinal) {
    std::vector<Axis> axes;
    for (const auto& p : net_.parents(name)) {
      const NumericNode& pn = done_.at(p);
      Axis ax{p, pn.card(), {}};
      Sign k = net_.curvature(p, name);
      bool use_levels = cardinal && k != Sign::Ambig;
      for (int i = 0; i < pn.card(); ++i)
        ax.coord.push_back(use_levels ? pn.levels[i] - pn.levels[0] : i);
      axes.push_back(std::move(ax));
    }
    return axes;
  }

  // Integer-valued function of the parents honouring signs, strictness,
  // stored synergies and (for deterministic children) curvatures.
  std::vector<double> function(const std::string& name,
                               const std::vector<Axis>& axes, bool curved) {
    const std::size_t m = axes.size();
    std::vector<std::vector<double>> cross(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        Sign s = net_.synergy(axes[i].name, axes[j].name, name);
        double c = 0;
        switch (s) {
          case Sign::Plus:
            c = uniform_int(1, 2);
            break;
          case Sign::Minus:
            c = -uniform_int(1, 2);
            break;
          case Sign::Zero:
            break;
          case Sign::Ambig:
            c = uniform_int(-1, 1);
            break;
        }
        cross[i][j] = cross[j][i] = c;
      }
    }
    std::vector<std::vector<double>> g(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Axis& ax = axes[i];
      double range = ax.coord.back();
      double bound = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) bound += std::abs(cross[i][j]) * axes[j].coord.back();
      Sign s = net_.sign(ax.name, name);
      Sign k = curved ? net_.curvature(ax.name, name) : Sign::Zero;
      if (curved && k == Sign::Ambig) {
        const Sign pick[] = {Sign::Plus, Sign::Minus, Sign::Zero};
        k = pick[uniform_int(0, 2)];
      }
      double beta = uniform_int(1, 2);
      g[i].resize(ax.card);
      if (s == Sign::Plus || s == Sign::Minus) {
        double alpha = net_.strict(ax.name, name) ? uniform_int(1, 2)
                                                  : uniform_int(0, 2);
        double slope = bound + alpha;
        // Increasing h with curvature kh; g = h for +, -h for -.
        Sign kh = s == Sign::Plus ? k : sign_neg(k);
        for (int v = 0; v < ax.card; ++v) {
          double x = ax.coord[v];
          double h = slope * x;
          if (kh == Sign::Plus) h += beta * x * x;
          if (kh == Sign::Minus) h += 2 * beta * range * x - beta * x * x;
          g[i][v] = s == Sign::Plus ? h : -h;
        }
      } else if (k == Sign::Zero || k == Sign::Plus || k == Sign::Minus) {
        if (!curved) {
          for (int v = 0; v < ax.card; ++v) g[i][v] = uniform_int(-3, 3);
        } else {
          double lin = uniform_int(-3, 3);
          double quad = k == Sign::Plus ? beta : k == Sign::Minus ? -beta : 0;
          for (int v = 0; v < ax.card; ++v) {
            double x = ax.coord[v];
            g[i][v] = lin * x + quad * x * x;
          }
        }
      }
    }
    std::vector<int> cards;
    for (const auto& ax : axes) cards.push_back(ax.card);
    const double base = uniform_int(0, 3);
    std::vector<double> f(product(cards));
    for (std::size_t r = 0; r < f.size(); ++r) {
      auto d = digits_of(r, cards);
      double v = base;
      for (std::size_t i = 0; i < m; ++i) {
        v += g[i][d[i]];
        for (std::size_t j = i + 1; j < m; ++j)
          v += cross[i][j] * axes[i].coord[d[i]] * axes[j].coord[d[j]];
      }
      f[r] = v;
    }
    return f;
  }

  NumericNode deterministic(const std::string& name) {
    NumericNode n;
    n.name = name;
    n.kind = NodeKind::Deterministic;
    auto axes = axes_for(name, true);
    for (const auto& ax : axes) n.parents.push_back(ax.name);
    auto f = function(name, axes, true);
    n.levels = f;
    std::sort(n.levels.begin(), n.levels.end());
    n.levels.erase(std::unique(n.levels.begin(), n.levels.end()),
                   n.levels.end());
    auto it = cfg_.cardinalities.find(name);
    if (it != cfg_.cardinalities.end() &&
        n.card() > it->second) {
      throw OracleError("constraint conflict at deterministic node '" + name +
                        "': its constraints need " +
                        std::to_string(n.card()) +
                        " distinct values but the cardinality is " +
                        std::to_string(it->second));
    }
    for (double v : f) {
      auto pos = std::lower_bound(n.levels.begin(), n.levels.end(), v);
      n.table.push_back(static_cast<int>(pos - n.levels.begin()));
    }
    return n;
  }

  bool has_definite_synergy(const std::string& name) const {
    for (const auto& [key, s] : net_.synergies())
      if (key.child == name && s != Sign::Ambig) return true;
    return false;
  }

  NumericNode probabilistic(const std::string& name) {
    NumericNode n;
    n.name = name;
    n.kind = NodeKind::Probabilistic;
    const int k = card_of(name);
    for (int v = 0; v < k; ++v) n.levels.push_back(v);
    auto axes = axes_for(name, false);
    for (const auto& ax : axes) n.parents.push_back(ax.name);
    std::vector<int> cards;
    for (const auto& ax : axes) cards.push_back(ax.card);
    const std::size_t rows = product(cards);

    AuditOptions opts{cfg_.tolerance, cfg_.strict_margin, false};
    Network local;
    for (const auto& p : n.parents) local.add_node(p, NodeKind::Probabilistic);
    local.add_node(name, NodeKind::Probabilistic);
    for (const auto& p : n.parents) {
      auto e = net_.edge(p, name);
      local.set_edge(p, name, e->sign, e->strict);
    }
    for (const auto& [key, s] : net_.synergies())
      if (key.child == name) local.set_synergy(key.first, key.second, name, s);

    constexpr int kAttempts = 50;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      auto f = function(name, axes, false);
      auto [lo, hi] = std::minmax_element(f.begin(), f.end());
      std::vector<double> tau(k - 1);
      for (auto& t : tau) t = uniform(0.3, 1.0);
      std::sort(tau.rbegin(), tau.rend());
      if (!tau.empty()) tau[0] = 1.0;
      const bool structured_only = has_definite_synergy(name);
      const double lambda = structured_only ? 1.0 : uniform(0.5, 0.9);

      std::vector<std::vector<double>> surv(rows, std::vector<double>(k - 1));
      for (std::size_t r = 0; r < rows; ++r) {
        double h = *hi > *lo ? 0.1 + 0.8 * (f[r] - *lo) / (*hi - *lo) : 0.5;
        for (int t = 0; t < k - 1; ++t) surv[r][t] = lambda * tau[t] * h;
      }
      if (!structured_only) {
        auto rand = random_survival(name, axes, cards, k);
        for (std::size_t r = 0; r < rows; ++r)
          for (int t = 0; t < k - 1; ++t)
            surv[r][t] += (1 - lambda) * rand[r][t];
      }
      n.cpt.assign(rows * k, 0.0);
      for (std::size_t r = 0; r < rows; ++r) {
        double prev = 1.0;
        for (int t = 0; t < k; ++t) {
          double next = t + 1 < k ? surv[r][t] : 0.0;
          n.cpt[r * k + t] = std::max(0.0, prev - next);
          prev = next;
        }
      }
      std::vector<NumericNode> parts;
      for (const auto& p : n.parents) {
        NumericNode stub = done_.at(p);
        stub.kind = NodeKind::Probabilistic;
        stub.parents.clear();
        stub.table.clear();
        stub.cpt.assign(stub.card(), 1.0 / stub.card());
        parts.push_back(std::move(stub));
      }
      parts.push_back(n);
      if (audit(NumericNet(std::move(parts)), local, opts).empty()) return n;
    }
    throw OracleError("could not sample a table for '" + name +
                      "' meeting the strict margin " +
                      fmt_num(cfg_.strict_margin));
  }

  // Random survival functions, sorted along every signed axis so that each
  // monotonicity constraint holds.
  std::vector<std::vector<double>> random_survival(
      const std::string& name, const std::vector<Axis>& axes,
      const std::vector<int>& cards, int k) {
    const std::size_t rows = product(cards);
    std::vector<std::vector<double>> surv(rows, std::vector<double>(k - 1));
    std::exponential_distribution<double> expo(1.0);
    for (auto& row : surv) {
      std::vector<double> w(k);
      for (auto& x : w) x = expo(rng_);
      double total = std::accumulate(w.begin(), w.end(), 0.0);
      double acc = 1.0;
      for (int t = 0; t < k - 1; ++t) {
        acc -= w[t] / total;
        row[t] = std::max(0.0, acc);
      }
    }
    auto strides = strides_of(cards);
    for (int pass = 0; pass < 8; ++pass) {
      bool changed = false;
      for (std::size_t i = 0; i < axes.size(); ++i) {
        Sign s = net_.sign(axes[i].name, name);
        if (s != Sign::Plus && s != Sign::Minus) continue;
        for (std::size_t r = 0; r < rows; ++r) {
          if (digits_of(r, cards)[i] != 0) continue;
          for (int t = 0; t < k - 1; ++t) {
            std::vector<double> fiber;
            for (int v = 0; v < cards[i]; ++v)
              fiber.push_back(surv[r + v * strides[i]][t]);
            auto sorted = fiber;
            if (s == Sign::Plus)
              std::sort(sorted.begin(), sorted.end());
            else
              std::sort(sorted.rbegin(), sorted.rend());
            if (sorted != fiber) {
              changed = true;
              for (int v = 0; v < cards[i]; ++v)
                surv[r + v * strides[i]][t] = sorted[v];
            }
          }
        }
      }
      if (!changed) break;
    }
    return surv;
  }

  int card_of(const std::string& name) const {
    auto it = cfg_.cardinalities.find(name);
    if (it != cfg_.cardinalities.end()) return it->second;
    for (const auto& [key, s] : net_.synergies())
      if (key.first == name || key.second == name || key.child == name)
        return 3;
    for (const auto& [key, s] : net_.curvatures())
      if (key.parent == name || key.child == name) return 3;
    return 2;
  }

  const Network& net_;
  const OracleConfig& cfg_;
  std::mt19937_64 rng_;
  std::map<std::string, NumericNode> done_;
};

void check_size(const Network& net, const OracleConfig& cfg) {
  if (net.node_count() > kOracleMaxNodes)
    throw OracleError("network has " + std::to_string(net.node_count()) +
                      " nodes; the oracle enumerates at most " +
                      std::to_string(kOracleMaxNodes));
  for (const auto& [name, k] : cfg.cardinalities) {
    if (!net.has_node(name))
      throw OracleError("cardinality given for unknown node '" + name + "'");
    if (k < 2)
      throw OracleError("cardinality of '" + name + "' must be at least 2");
  }
  std::uint64_t joint = 1;
  for (const auto& [name, info] : net.nodes()) {
    if (info.kind == NodeKind::Deterministic) continue;
    auto it = cfg.cardinalities.find(name);
    int k = it != cfg.cardinalities.end() ? it->second : 3;
    joint *= static_cast<std::uint64_t>(k);
    if (joint > kOracleMaxJoint)
      throw OracleError("joint state space exceeds " +
                        std::to_string(kOracleMaxJoint) +
                        " assignments of probabilistic nodes");
  }
}

// Per-row quantities compared by the audit: survival function for a
// probabilistic node, the level for a deterministic one.
std::vector<double> row_profile(const NumericNode& n, std::size_t row) {
  if (n.kind == NodeKind::Deterministic) return {n.levels[n.table[row]]};
  return survival(n, row);
}

// Probability of each parent row of n, from the full joint.
std::vector<double> parent_row_mass(const NumericNet& nn, const NumericNode& n) {
  std::vector<double> mass(n.rows(), 0.0);
  nn.enumerate([&](const std::vector<int>& values, double p) {
    mass[nn.row_of(n, values)] += p;
  });
  return mass;
}

std::string describe_row(const NumericNode& n, const std::vector<int>& cards,
                         std::size_t row) {
  auto d = digits_of(row, cards);
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!out.empty()) out += ",";
    out += n.parents[i] + "=" + std::to_string(d[i]);
  }
  return "{" + out + "}";
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial)));
}

std::size_t NumericNode::rows() const {
  return kind == NodeKind::Deterministic ? table.size()
                                         : cpt.size() / levels.size();
}

NumericNet::NumericNet(std::vector<NumericNode> nodes)
    : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i].name] = i;
  for (const auto& n : nodes_)
    for (const auto& p : n.parents)
      if (!index_.count(p) || index_.at(p) >= index_.at(n.name))
        throw OracleError("numeric node '" + n.name +
                          "' listed before its parent '" + p + "'");
}

const NumericNode& NumericNet::node(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw OracleError("unknown node '" + name + "'");
  return nodes_[it->second];
}

std::size_t NumericNet::position(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw OracleError("unknown node '" + name + "'");
  return it->second;
}

std::size_t NumericNet::row_of(const NumericNode& n,
                               const std::vector<int>& values) const {
  std::size_t row = 0;
  for (const auto& p : n.parents) {
    std::size_t i = index_.at(p);
    row = row * nodes_[i].levels.size() + values[i];
  }
  return row;
}

std::size_t NumericNet::row_of(const NumericNode& n,
                               const std::vector<int>& parent_values,
                               int) const {
  std::size_t row = 0;
  for (std::size_t k = 0; k < n.parents.size(); ++k)
    row = row * node(n.parents[k]).levels.size() + parent_values[k];
  return row;
}

void NumericNet::enumerate(
    const std::function<void(const std::vector<int>&, double)>& visit) const {
  std::vector<int> values(nodes_.size(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double p) {
    if (i == nodes_.size()) {
      visit(values, p);
      return;
    }
    const NumericNode& n = nodes_[i];
    std::size_t row = row_of(n, values);
    if (n.kind == NodeKind::Deterministic) {
      values[i] = n.table[row];
      rec(i + 1, p);
      return;
    }
    for (int v = 0; v < n.card(); ++v) {
      double q = n.prob(row, v);
      if (q <= 0) continue;
      values[i] = v;
      rec(i + 1, p * q);
    }
  };
  rec(0, 1.0);
}

std::map<std::vector<int>, double> NumericNet::joint() const {
  std::vector<std::size_t> order;
  for (const auto& [name, i] : index_) order.push_back(i);
  std::map<std::vector<int>, double> out;
  enumerate([&](const std::vector<int>& values, double p) {
    std::vector<int> key;
    key.reserve(order.size());
    for (auto i : order) key.push_back(values[i]);
    out[key] += p;
  });
  return out;
}

NumericNet sample_numeric_net(const Network& net, const OracleConfig& cfg,
                              std::size_t trial) {
  check_size(net, cfg);
  Sampler s(net, cfg, trial_seed(cfg.seed, trial));
  return s.run();
}

std::vector<std::string> audit(const NumericNet& nn, const Network& net,
                               const AuditOptions& opts) {
  std::vector<std::string> out;
  const double tol = opts.tolerance;
  for (const auto& n : nn.nodes()) {
    if (!net.has_node(n.name)) {
      out.push_back("node '" + n.name + "' is not in the network");
      continue;
    }
    std::vector<std::string> expected(net.parents(n.name).begin(),
                                      net.parents(n.name).end());
    if (expected != n.parents) {
      out.push_back("parents of '" + n.name + "' differ from the network");
      continue;
    }
    std::vector<int> cards;
    for (const auto& p : n.parents) cards.push_back(nn.node(p).card());
    const auto strides = strides_of(cards);
    const std::size_t rows = product(cards);
    if (n.kind == NodeKind::Probabilistic) {
      for (std::size_t r = 0; r < rows; ++r) {
        double total = 0;
        for (int v = 0; v < n.card(); ++v) {
          if (n.prob(r, v) < -tol)
            out.push_back("negative probability in '" + n.name + "'");
          total += n.prob(r, v);
        }
        if (std::abs(total - 1.0) > 1e-9)
          out.push_back("row " + describe_row(n, cards, r) + " of '" +
                        n.name + "' sums to " + fmt_num(total));
      }
    }
    std::vector<double> mass;
    if (opts.skip_zero_probability_rows) mass = parent_row_mass(nn, n);
    auto live = [&](std::size_t r) {
      return mass.empty() || mass[r] > 0;
    };

    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const std::string& p = n.parents[i];
      Sign s = net.sign(p, n.name);
      bool strict = net.strict(p, n.name);
      for (std::size_t r = 0; r < rows; ++r) {
        auto d = digits_of(r, cards);
        if (d[i] + 1 >= cards[i]) continue;
        std::size_t up = r + strides[i];
        if (!live(r) || !live(up)) continue;
        auto lo = row_profile(n, r);
        auto hi = row_profile(n, up);
        double worst_up = -std::numeric_limits<double>::infinity();
        double worst_down = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < lo.size(); ++t) {
          worst_up = std::max(worst_up, hi[t] - lo[t]);
          worst_down = std::max(worst_down, lo[t] - hi[t]);
        }
        if (lo.empty()) worst_up = worst_down = 0;
        std::string where = "edge " + p + "->" + n.name + " at " +
                            describe_row(n, cards, r);
        bool ok = true;
        switch (s) {
          case Sign::Plus:
            ok = worst_down <= tol;
            break;
          case Sign::Minus:
            ok = worst_up <= tol;
            break;
          case Sign::Zero:
            ok = worst_up <= tol && worst_down <= tol;
            break;
          case Sign::Ambig:
            break;
        }
        if (!ok) {
          out.push_back(where + ": sign " + std::string(to_string(s)) +
                        " broken");
          continue;
        }
        if (!strict || s == Sign::Ambig || s == Sign::Zero) continue;
        double gain = s == Sign::Plus ? worst_up : worst_down;
        double need = n.kind == NodeKind::Deterministic ? 0.0
                                                        : opts.strict_margin;
        if (n.kind == NodeKind::Probabilistic && need <= 0) continue;
        if (n.kind == NodeKind::Deterministic ? gain <= 0 : gain < need - tol)
          out.push_back(where + ": strict step " + fmt_num(gain) +
                        " below " + fmt_num(need));
      }
    }

    for (const auto& [key, s] : net.synergies()) {
      if (key.child != n.name || s == Sign::Ambig) continue;
      auto ia = std::find(n.parents.begin(), n.parents.end(), key.first) -
                n.parents.begin();
      auto ib = std::find(n.parents.begin(), n.parents.end(), key.second) -
                n.parents.begin();
      if (ia >= static_cast<long>(n.parents.size()) ||
          ib >= static_cast<long>(n.parents.size()))
        continue;
      bool broken = false;
      for (std::size_t r = 0; r < rows && !broken; ++r) {
        auto d = digits_of(r, cards);
        if (d[ia] != 0 || d[ib] != 0) continue;
        for (int a1 = 1; a1 < cards[ia] && !broken; ++a1)
          for (int a2 = 0; a2 < a1 && !broken; ++a2)
            for (int b1 = 1; b1 < cards[ib] && !broken; ++b1)
              for (int b2 = 0; b2 < b1 && !broken; ++b2) {
                auto at = [&](int a, int b) {
                  return r + a * strides[ia] + b * strides[ib];
                };
                if (!live(at(a1, b1)) || !live(at(a2, b2)) ||
                    !live(at(a1, b2)) || !live(at(a2, b1)))
                  continue;
                auto p11 = row_profile(n, at(a1, b1));
                auto p22 = row_profile(n, at(a2, b2));
                auto p12 = row_profile(n, at(a1, b2));
                auto p21 = row_profile(n, at(a2, b1));
                for (std::size_t t = 0; t < p11.size(); ++t) {
                  double md = p11[t] + p22[t] - p12[t] - p21[t];
                  double scale = 1 + std::abs(p11[t]) + std::abs(p22[t]);
                  if (!admits(s, md) &&
                      !(std::abs(md) <= tol * scale && s != Sign::Ambig)) {
                    broken = true;
                    out.push_back("synergy " + std::string(to_string(s)) +
                                  " of {" + key.first + "," + key.second +
                                  "} on " + n.name + " broken at " +
                                  describe_row(n, cards, r) +
                                  " (mixed difference " + fmt_num(md) + ")");
                    break;
                  }
                }
              }
      }
    }

    for (const auto& [key, k] : net.curvatures()) {
      if (key.child != n.name || k == Sign::Ambig ||
          n.kind != NodeKind::Deterministic)
        continue;
      auto i = std::find(n.parents.begin(), n.parents.end(), key.parent) -
               n.parents.begin();
      if (i >= static_cast<long>(n.parents.size())) continue;
      const auto& lv = nn.node(key.parent).levels;
      for (std::size_t r = 0; r < rows; ++r) {
        auto d = digits_of(r, cards);
        if (d[i] != 0) continue;
        for (int v = 1; v + 1 < cards[i]; ++v) {
          auto val = [&](int x) {
            return n.levels[n.table[r + x * strides[i]]];
          };
          double s1 = (val(v) - val(v - 1)) / (lv[v] - lv[v - 1]);
          double s2 = (val(v + 1) - val(v)) / (lv[v + 1] - lv[v]);
          double diff = s2 - s1;
          double scale = 1 + std::abs(s1) + std::abs(s2);
          bool ok = k == Sign::Plus    ? diff >= -tol * scale
                    : k == Sign::Minus ? diff <= tol * scale
                                       : std::abs(diff) <= tol * scale;
          if (!ok)
            out.push_back("curvature " + std::string(to_string(k)) + " of " +
                          key.parent + "->" + n.name + " broken at " +
                          describe_row(n, cards, r));
        }
      }
    }
  }
  return out;
}

namespace {

std::string describe_assignment(const NumericNet& nn,
                                const std::vector<std::string>& names,
                                const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!out.empty()) out += ",";
    out += names[i] + "=" + fmt_num(nn.node(names[i]).levels[values[i]]);
  }
  return "{" + out + "}";
}

double violation_amount(Sign claimed, const std::vector<double>& before,
                        const std::vector<double>& after) {
  // before/after are CDFs of the target at two source values, after being
  // at the larger one.
  double m = 0;
  for (std::size_t t = 0; t + 1 < before.size(); ++t) {
    double d = after[t] - before[t];
    switch (claimed) {
      case Sign::Plus:
        m = std::max(m, d);
        break;
      case Sign::Minus:
        m = std::max(m, -d);
        break;
      case Sign::Zero:
        m = std::max(m, std::abs(d));
        break;
      case Sign::Ambig:
        break;
    }
  }
  return m;
}

}  // namespace

CheckReport exact_influence_check(const NumericNet& nn, const InfluenceQuery& q,
                                  Sign claimed, double tolerance) {
  const std::vector<std::string> given(q.given.begin(), q.given.end());
  std::vector<std::size_t> gpos;
  std::size_t given_combos = 1;
  for (const auto& g : given) {
    gpos.push_back(nn.position(g));
    given_combos *= nn.node(g).levels.size();
  }
  const std::size_t spos = nn.position(q.source);
  const std::size_t tpos = nn.position(q.target);
  const int scard = nn.node(q.source).card();
  const int tcard = nn.node(q.target).card();

  std::map<std::vector<int>, std::vector<std::vector<double>>> table;
  nn.enumerate([&](const std::vector<int>& values, double p) {
    std::vector<int> key;
    for (auto i : gpos) key.push_back(values[i]);
    auto& m = table[key];
    if (m.empty()) m.assign(scard, std::vector<double>(tcard, 0.0));
    m[values[spos]][values[tpos]] += p;
  });

  CheckReport rep;
  rep.worst_margin = 0;
  std::size_t live = 0;
  for (const auto& [key, m] : table) {
    std::vector<std::vector<double>> cdfs;
    std::vector<int> svals;
    for (int s = 0; s < scard; ++s) {
      double total = std::accumulate(m[s].begin(), m[s].end(), 0.0);
      if (total <= 0) continue;
      ++live;
      std::vector<double> cdf(tcard);
      double acc = 0;
      for (int t = 0; t < tcard; ++t) {
        acc += m[s][t];
        cdf[t] = acc / total;
      }
      cdfs.push_back(std::move(cdf));
      svals.push_back(s);
    }
    if (claimed == Sign::Ambig) continue;
    for (std::size_t i = 1; i < cdfs.size(); ++i) {
      std::size_t j = claimed == Sign::Zero ? 0 : i - 1;
      double amount = violation_amount(claimed, cdfs[j], cdfs[i]);
      ++rep.comparisons;
      rep.worst_margin = std::max(rep.worst_margin, amount);
      if (amount > tolerance) {
        rep.consistent = false;
        OracleViolation v;
        const auto& snode = nn.node(q.source);
        v.assignment = describe_assignment(nn, given, key) + " " + q.source +
                       ": " + fmt_num(snode.levels[svals[j]]) + " -> " +
                       fmt_num(snode.levels[svals[i]]);
        v.observed = "CDF of " + q.target + " moves by " + fmt_num(amount) +
                     " against claimed sign " +
                     std::string(to_string(claimed));
        rep.violations.push_back(std::move(v));
      }
    }
  }
  rep.skipped_contexts = given_combos * scard - live;
  return rep;
}

CheckReport exact_synergy_check(const NumericNet& nn, const std::string& a,
                                const std::string& b, const std::string& child,
                                const std::set<std::string>& context,
                                Sign claimed, double tolerance,
                                const std::vector<double>& phi) {
  std::vector<std::string> ctx;
  for (const auto& c : context)
    if (c != a && c != b && c != child) ctx.push_back(c);
  std::vector<std::size_t> cpos;
  std::size_t combos = 1;
  for (const auto& c : ctx) {
    cpos.push_back(nn.position(c));
    combos *= nn.node(c).levels.size();
  }
  const std::size_t apos = nn.position(a), bpos = nn.position(b),
                    kpos = nn.position(child);
  const int acard = nn.node(a).card(), bcard = nn.node(b).card();
  const auto& klev = phi.empty() ? nn.node(child).levels : phi;

  struct Cell {
    double mass = 0, moment = 0;
  };
  std::map<std::vector<int>, std::vector<Cell>> table;
  nn.enumerate([&](const std::vector<int>& values, double p) {
    std::vector<int> key;
    for (auto i : cpos) key.push_back(values[i]);
    auto& cells = table[key];
    if (cells.empty()) cells.resize(acard * bcard);
    Cell& c = cells[values[apos] * bcard + values[bpos]];
    c.mass += p;
    c.moment += p * klev[values[kpos]];
  });

  CheckReport rep;
  rep.worst_margin = 0;
  std::size_t live = 0;
  for (const auto& [key, cells] : table) {
    for (const auto& c : cells)
      if (c.mass > 0) ++live;
    if (claimed == Sign::Ambig) continue;
    auto e = [&](int x, int y) {
      const Cell& c = cells[x * bcard + y];
      return c.moment / c.mass;
    };
    auto defined = [&](int x, int y) { return cells[x * bcard + y].mass > 0; };
    double scale = 1;
    for (const auto& c : cells)
      if (c.mass > 0) scale = std::max(scale, 1 + std::abs(c.moment / c.mass));
    for (int a1 = 1; a1 < acard; ++a1)
      for (int a2 = 0; a2 < a1; ++a2)
        for (int b1 = 1; b1 < bcard; ++b1)
          for (int b2 = 0; b2 < b1; ++b2) {
            if (!defined(a1, b1) || !defined(a2, b2) || !defined(a1, b2) ||
                !defined(a2, b1))
              continue;
            double md = e(a1, b1) + e(a2, b2) - e(a1, b2) - e(a2, b1);
            double amount = claimed == Sign::Plus    ? -md
                            : claimed == Sign::Minus ? md
                                                     : std::abs(md);
            ++rep.comparisons;
            rep.worst_margin = std::max(rep.worst_margin, amount / scale);
            if (amount > tolerance * scale) {
              rep.consistent = false;
              OracleViolation v;
              v.assignment = describe_assignment(nn, ctx, key) + " " + a +
                             ": " + std::to_string(a2) + "->" +
                             std::to_string(a1) + ", " + b + ": " +
                             std::to_string(b2) + "->" + std::to_string(b1);
              v.observed = "mixed difference of E[" + child + "] is " +
                           fmt_num(md) + " against claimed sign " +
                           std::string(to_string(claimed));
              rep.violations.push_back(std::move(v));
            }
          }
  }
  rep.skipped_contexts = combos * acard * bcard - live;
  return rep;
}

NumericNet reverse_numeric(const NumericNet& nn, const std::string& c,
                           const std::string& d) {
  const NumericNode& cn = nn.node(c);
  const NumericNode& dn = nn.node(d);
  if (cn.kind != NodeKind::Probabilistic || dn.kind != NodeKind::Probabilistic)
    throw OracleError("numeric reversal needs two probabilistic nodes");
  if (std::find(dn.parents.begin(), dn.parents.end(), c) == dn.parents.end())
    throw OracleError("no arc " + c + " -> " + d + " to reverse");

  std::set<std::string> uset(cn.parents.begin(), cn.parents.end());
  for (const auto& p : dn.parents)
    if (p != c) uset.insert(p);
  const std::vector<std::string> u(uset.begin(), uset.end());
  std::set<std::string> cset = uset;
  cset.insert(d);
  const std::vector<std::string> cpar(cset.begin(), cset.end());

  std::vector<int> ucards;
  for (const auto& p : u) ucards.push_back(nn.node(p).card());
  const int kc = cn.card(), kd = dn.card();

  NumericNode nd = dn;
  nd.parents = u;
  nd.cpt.assign(product(ucards) * kd, 0.0);
  NumericNode nc = cn;
  nc.parents = cpar;
  std::vector<int> ccards;
  for (const auto& p : cpar)
    ccards.push_back(p == d ? kd : nn.node(p).card());
  nc.cpt.assign(product(ccards) * kc, 0.0);

  auto lookup = [&](const std::vector<std::string>& names,
                    const std::vector<int>& vals, const std::string& who) {
    return vals[std::find(names.begin(), names.end(), who) - names.begin()];
  };

  for (std::size_t r = 0; r < product(ucards); ++r) {
    auto uv = digits_of(r, ucards);
    std::vector<std::vector<double>> joint(kc, std::vector<double>(kd));
    std::vector<int> cpv;
    for (const auto& p : cn.parents) cpv.push_back(lookup(u, uv, p));
    std::size_t crow = nn.row_of(cn, cpv, 0);
    for (int x = 0; x < kc; ++x) {
      std::vector<int> dpv;
      for (const auto& p : dn.parents)
        dpv.push_back(p == c ? x : lookup(u, uv, p));
      std::size_t drow = nn.row_of(dn, dpv, 0);
      for (int y = 0; y < kd; ++y)
        joint[x][y] = cn.prob(crow, x) * dn.prob(drow, y);
    }
    for (int y = 0; y < kd; ++y) {
      double py = 0;
      for (int x = 0; x < kc; ++x) py += joint[x][y];
      nd.cpt[r * kd + y] = py;
      std::vector<int> cv;
      for (const auto& p : cpar) cv.push_back(p == d ? y : lookup(u, uv, p));
      std::size_t row = 0;
      for (std::size_t i = 0; i < cv.size(); ++i)
        row = row * ccards[i] + cv[i];
      for (int x = 0; x < kc; ++x)
        nc.cpt[row * kc + x] = py > 0 ? joint[x][y] / py : 1.0 / kc;
    }
  }

  std::vector<NumericNode> nodes;
  for (const auto& n : nn.nodes()) {
    if (n.name == c)
      nodes.push_back(nc);
    else if (n.name == d)
      nodes.push_back(nd);
    else
      nodes.push_back(n);
  }
  return NumericNet(order_nodes(std::move(nodes)));
}

double max_joint_difference(const NumericNet& x, const NumericNet& y) {
  auto jx = x.joint();
  auto jy = y.joint();
  double worst = 0;
  for (const auto& [k, p] : jx) {
    auto it = jy.find(k);
    worst = std::max(worst, std::abs(p - (it == jy.end() ? 0.0 : it->second)));
  }
  for (const auto& [k, p] : jy)
    if (!jx.count(k)) worst = std::max(worst, p);
  return worst;
}

namespace {

template <typename Check>
void run_trials(const Network& net, const OracleConfig& cfg,
                OracleVerdict& verdict, Check check) {
  AuditOptions opts{cfg.tolerance, cfg.strict_margin, false};
  for (int t = 0; t < cfg.trials; ++t) {
    const auto trial = static_cast<std::size_t>(t);
    NumericNet nn = sample_numeric_net(net, cfg, trial);
    auto problems = audit(nn, net, opts);
    if (!problems.empty())
      throw OracleError("sampled parameterization violates its constraints: " +
                        problems.front());
    TrialRecord rec;
    rec.seed = trial_seed(cfg.seed, trial);
    rec.trial = trial;
    if (verdict.vacuous()) {
      for (Sign s : {Sign::Plus, Sign::Minus, Sign::Zero})
        if (check(nn, s, trial).consistent) ++verdict.support[s];
    } else {
      CheckReport r = check(nn, verdict.engine_sign, trial);
      rec.consistent = r.consistent;
      rec.worst_margin = r.worst_margin;
      rec.skipped_contexts = r.skipped_contexts;
      for (auto v : r.violations) {
        v.seed = rec.seed;
        v.trial = trial;
        verdict.violations.push_back(std::move(v));
      }
    }
    verdict.records.push_back(rec);
    ++verdict.trials_run;
  }
}

}  // namespace

OracleVerdict soundness_report(const Network& net, const InfluenceQuery& q,
                               const OracleConfig& cfg) {
  QueryResult r = qualitative_influence(net, q);
  OracleVerdict verdict;
  verdict.query = "influence of " + q.source + " on " + q.target + " given " +
                  join_set(q.given);
  verdict.engine_sign = r.sign;
  run_trials(net, cfg, verdict, [&](const NumericNet& nn, Sign s, std::size_t trial) {
    (void)trial;
    return exact_influence_check(nn, q, s, cfg.tolerance);
  });
  return verdict;
}

OracleVerdict soundness_report(const Network& net, const SynergyQuery& q,
                               const OracleConfig& cfg) {
  SynergyResult r = qualitative_synergy(net, q);
  std::set<std::string> ctx = q.given;
  ctx.insert(r.context.begin(), r.context.end());
  OracleVerdict verdict;
  verdict.query = "synergy of {" + q.a + "," + q.b + "} on " + q.child +
                  " given " + join_set(ctx);
  verdict.engine_sign = r.sign;
  const bool prob_child = !net.is_deterministic(q.child);
  run_trials(net, cfg, verdict, [&](const NumericNet& nn, Sign s, std::size_t trial) {
    CheckReport rep =
        exact_synergy_check(nn, q.a, q.b, q.child, ctx, s, cfg.tolerance);
    if (!prob_child) return rep;
    // Expectation supermodularity must hold for every increasing transform
    // of a probabilistic child; sample a few.
    std::mt19937_64 rng(trial_seed(~cfg.seed, trial));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < cfg.synergy_transforms; ++i) {
      std::vector<double> phi(nn.node(q.child).levels.size());
      for (auto& v : phi) v = unit(rng);
      std::sort(phi.begin(), phi.end());
      CheckReport more =
          exact_synergy_check(nn, q.a, q.b, q.child, ctx, s, cfg.tolerance, phi);
      rep.consistent = rep.consistent && more.consistent;
      rep.worst_margin = std::max(rep.worst_margin, more.worst_margin);
      rep.comparisons += more.comparisons;
      for (auto& v : more.violations) {
        v.observed += " (transformed child)";
        rep.violations.push_back(std::move(v));
      }
    }
    return rep;
  });
  return verdict;
}

}  // namespace qpn
