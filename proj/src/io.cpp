#include "qpn/io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "qpn/errors.hpp"

namespace qpn {

ParseError::ParseError(int line, int column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char ch = line[i];
    if (ch == '#') break;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r' && line[i] != '#')
      ++i;
    out.push_back({std::string(line.substr(start, i - start)),
                   static_cast<int>(start) + 1});
  }
  return out;
}

class Parser {
 public:
  Network run(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      line_ = line_no;
      statement(tokenize(text.substr(pos, end - pos)));
      pos = end + 1;
    }
    check_annotations();
    return std::move(net_);
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(line_, at.column, msg);
  }

  void expect_arity(const std::vector<Token>& toks, std::size_t lo,
                    std::size_t hi, const char* usage) const {
    if (toks.size() < lo || toks.size() > hi) {
      const Token& at = toks.size() > hi ? toks[hi] : toks.back();
      fail(at, std::string("expected: ") + usage);
    }
  }

  const std::string& name(const Token& t) const {
    if (!is_valid_name(t.text))
      fail(t, "invalid name '" + t.text + "' (use [A-Za-z_][A-Za-z0-9_]*)");
    return t.text;
  }

  const std::string& known(const Token& t) const {
    name(t);
    if (!net_.has_node(t.text))
      fail(t, "unknown node '" + t.text + "' (declare it with 'node' first)");
    return t.text;
  }

  Sign sign(const Token& t) const {
    auto s = parse_sign(t.text);
    if (!s) fail(t, "invalid sign '" + t.text + "' (expected +, -, 0 or ?)");
    return *s;
  }

  void statement(const std::vector<Token>& toks) {
    if (toks.empty()) return;
    const std::string& kw = toks[0].text;
    if (kw == "node")
      node(toks);
    else if (kw == "edge")
      edge(toks);
    else if (kw == "synergy")
      synergy(toks);
    else if (kw == "curvature")
      curvature(toks);
    else
      fail(toks[0], "unknown directive '" + kw +
                        "' (expected node, edge, synergy or curvature)");
  }

  void node(const std::vector<Token>& toks) {
    expect_arity(toks, 3, 3, "node <name> prob|det");
    const std::string& n = name(toks[1]);
    if (net_.has_node(n)) fail(toks[1], "duplicate node '" + n + "'");
    NodeKind kind;
    if (toks[2].text == "prob")
      kind = NodeKind::Probabilistic;
    else if (toks[2].text == "det")
      kind = NodeKind::Deterministic;
    else
      fail(toks[2], "invalid node kind '" + toks[2].text +
                        "' (expected prob or det)");
    net_.add_node(n, kind);
  }

  void edge(const std::vector<Token>& toks) {
    expect_arity(toks, 4, 5, "edge <parent> <child> <sign> [strict|nonstrict]");
    const std::string& p = known(toks[1]);
    const std::string& c = known(toks[2]);
    Sign s = sign(toks[3]);
    if (p == c) fail(toks[2], "self-loop " + p + " -> " + c);
    if (net_.edge(p, c)) fail(toks[1], "duplicate edge " + p + " -> " + c);
    if (s == Sign::Zero)
      fail(toks[3], "zero influence on " + p + " -> " + c +
                        " (omit the edge; absence already means 0)");
    bool strict = default_strict(net_.kind(c));
    if (toks.size() == 5) {
      if (toks[4].text == "strict")
        strict = true;
      else if (toks[4].text == "nonstrict")
        strict = false;
      else
        fail(toks[4], "invalid flag '" + toks[4].text +
                          "' (expected strict or nonstrict)");
      if (strict && s == Sign::Ambig)
        fail(toks[4], "a '?' influence cannot be strict");
    }
    auto cycle = net_.find_path(c, p);
    if (!cycle.empty()) {
      std::string path;
      for (const auto& n : cycle) path += n + " -> ";
      fail(toks[1], "edge closes a directed cycle: " + path + c);
    }
    net_.set_edge(p, c, s, strict);
  }

  void synergy(const std::vector<Token>& toks) {
    expect_arity(toks, 5, 5, "synergy <name1> <name2> <child> <sign>");
    const std::string& a = known(toks[1]);
    const std::string& b = known(toks[2]);
    const std::string& c = known(toks[3]);
    Sign s = sign(toks[4]);
    if (a == b) fail(toks[2], "synergy needs two distinct nodes");
    SynergyKey key(a, b, c);
    if (seen_synergy_.count(key))
      fail(toks[1], "duplicate synergy {" + a + "," + b + "} on " + c);
    seen_synergy_[key] = {line_, toks[1].column};
    net_.set_synergy(a, b, c, s);
  }

  void curvature(const std::vector<Token>& toks) {
    expect_arity(toks, 4, 4, "curvature <parent> <child> <sign>");
    const std::string& p = known(toks[1]);
    const std::string& c = known(toks[2]);
    Sign s = sign(toks[3]);
    EdgeKey key{p, c};
    if (seen_curvature_.count(key))
      fail(toks[1], "duplicate curvature " + p + " on " + c);
    if (!net_.is_deterministic(c))
      fail(toks[2], "curvature on probabilistic node '" + c +
                        "' (only deterministic nodes carry curvature)");
    seen_curvature_[key] = {line_, toks[1].column};
    net_.set_curvature(p, c, s);
  }

  // Edges may follow the annotations that refer to them, so parenthood is
  // checked once the whole file is read.
  void check_annotations() const {
    for (const auto& [key, where] : seen_synergy_) {
      const auto& ps = net_.parents(key.child);
      for (const auto* member : {&key.first, &key.second})
        if (!ps.count(*member))
          throw ParseError(where.first, where.second,
                           "synergy member '" + *member +
                               "' is not a parent of '" + key.child + "'");
    }
    for (const auto& [key, where] : seen_curvature_)
      if (!net_.parents(key.child).count(key.parent))
        throw ParseError(where.first, where.second,
                         "curvature parent '" + key.parent +
                             "' is not a parent of '" + key.child + "'");
  }

  Network net_;
  int line_ = 0;
  std::map<SynergyKey, std::pair<int, int>> seen_synergy_;
  std::map<EdgeKey, std::pair<int, int>> seen_curvature_;
};

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

Network load_network(std::string_view text) { return Parser().run(text); }

Network load_network(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_network(buf.str());
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file '" + path + "'");
  return load_network(in);
}

std::string serialize(const Network& net) {
  std::ostringstream out;
  out << kSerializeHeader;
  for (const auto& [name, node] : net.nodes())
    out << "node " << name << ' ' << to_string(node.kind) << '\n';
  for (const auto& [key, inf] : net.edges()) {
    out << "edge " << key.parent << ' ' << key.child << ' '
        << to_string(inf.sign);
    if (inf.strict != default_strict(net.kind(key.child)))
      out << (inf.strict ? " strict" : " nonstrict");
    out << '\n';
  }
  for (const auto& [key, s] : net.synergies())
    out << "synergy " << key.first << ' ' << key.second << ' ' << key.child
        << ' ' << to_string(s) << '\n';
  for (const auto& [key, s] : net.curvatures())
    out << "curvature " << key.parent << ' ' << key.child << ' '
        << to_string(s) << '\n';
  return out.str();
}

std::string to_dot(const Network& net) {
  std::ostringstream out;
  out << "digraph qpn {\n";
  for (const auto& [name, node] : net.nodes()) {
    out << "  " << quoted(name) << " [shape=ellipse";
    if (node.kind == NodeKind::Deterministic) out << ", peripheries=2";
    out << "];\n";
  }
  for (const auto& [key, inf] : net.edges()) {
    out << "  " << quoted(key.parent) << " -> " << quoted(key.child)
        << " [label=" << quoted(std::string(to_string(inf.sign)));
    if (!inf.strict && net.is_deterministic(key.child))
      out << ", style=\"bold,dotted\"";
    auto curv = net.curvatures().find(key);
    if (curv != net.curvatures().end())
      out << ", xlabel=" << quoted("curv " + std::string(to_string(curv->second)));
    out << "];\n";
  }
  for (const auto& [key, s] : net.synergies())
    out << "  " << quoted(key.first) << " -> " << quoted(key.second)
        << " [dir=none, style=dashed, constraint=false, label="
        << quoted(std::string(to_string(s))) << ", comment="
        << quoted("synergy on " + key.child) << "];\n";
  out << "}\n";
  return out.str();
}

}  // namespace qpn
