#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <sstream>

#include "qpn/errors.hpp"
#include "qpn/io.hpp"
#include "qpn/oracle.hpp"
#include "qpn/query.hpp"
#include "qpn/separation.hpp"
#include "qpn/synergy.hpp"
#include "qpn/transforms.hpp"

namespace qpn::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::set<std::string> parse_given(const std::string& text) {
  std::set<std::string> out;
  for (const auto& name : split(text, ',')) {
    if (!is_valid_name(name))
      throw UsageError("'" + name + "' is not a valid node name");
    out.insert(name);
  }
  return out;
}

TransformOp parse_op(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw UsageError("--op must look like reverse:c,d, dnp:c, reduce:c or barren:c");
  std::string kind = text.substr(0, colon);
  auto args = split(text.substr(colon + 1), ',');
  for (const auto& a : args)
    if (!is_valid_name(a)) throw UsageError("'" + a + "' is not a valid node name");
  if (kind == "reverse" && args.size() == 2)
    return TransformOp::reverse(args[0], args[1]);
  if (args.size() == 1) {
    if (kind == "dnp") return TransformOp::propagate(args[0]);
    if (kind == "reduce") return TransformOp::reduce(args[0]);
    if (kind == "barren") return TransformOp::remove_barren(args[0]);
  }
  throw UsageError("--op must look like reverse:c,d, dnp:c, reduce:c or barren:c");
}

std::map<std::string, int> parse_cards(const std::vector<std::string>& specs) {
  std::map<std::string, int> out;
  for (const auto& spec : specs) {
    for (const auto& item : split(spec, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--card expects node=k");
      std::string name = item.substr(0, eq);
      int k = 0;
      try {
        k = std::stoi(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw UsageError("--card expects an integer in '" + item + "'");
      }
      if (k < 2) throw UsageError("--card values must be at least 2");
      out[name] = k;
    }
  }
  return out;
}

json to_json(const TraceStep& step) {
  json updates = json::array();
  for (const auto& u : step.updates)
    updates.push_back({{"target", u.target},
                       {"before", std::string(to_string(u.before))},
                       {"after", std::string(to_string(u.after))},
                       {"formula", u.formula}});
  json j = {{"op", step.op.to_string()},
            {"before", step.before},
            {"after", step.after},
            {"updates", updates},
            {"notes", step.notes}};
  j["case"] = step.op.applied_case
                  ? json(std::string(to_string(*step.op.applied_case)))
                  : json(nullptr);
  return j;
}

json to_json(const Trace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) steps.push_back(to_json(s));
  return steps;
}

std::string sign_str(Sign s) { return std::string(to_string(s)); }

struct Options {
  bool json_out = false;
  std::string network;
  std::string from, to, a, b, child, x, y, given, op;
  bool explain = false;
  int trials = 20;
  std::uint64_t seed = 1;
  double margin = 1e-3;
  double tolerance = 1e-9;
  std::vector<std::string> cards;
};

int influence(const Options& o, std::ostream& out) {
  Network net = load_network_file(o.network);
  InfluenceQuery q{o.from, o.to, parse_given(o.given)};
  QueryResult r = qualitative_influence(net, q);
  if (o.json_out) {
    json j = {{"command", "query-influence"},
              {"source", q.source},
              {"target", q.target},
              {"given", q.given},
              {"sign", sign_str(r.sign)},
              {"trace", to_json(r.trace)},
              {"notes", r.notes},
              {"final_network", serialize(r.final_net)}};
    out << j.dump(2) << "\n";
    return 0;
  }
  out << to_string(r.sign) << "\n";
  if (o.explain) out << explain(r);
  return 0;
}

int synergy(const Options& o, std::ostream& out) {
  Network net = load_network_file(o.network);
  SynergyQuery q{o.a, o.b, o.child, parse_given(o.given)};
  SynergyResult r = qualitative_synergy(net, q);
  if (o.json_out) {
    json j = {{"command", "query-synergy"},
              {"a", q.a},
              {"b", q.b},
              {"child", q.child},
              {"given", q.given},
              {"sign", sign_str(r.sign)},
              {"context", r.context},
              {"trace", to_json(r.trace)},
              {"notes", r.notes},
              {"final_network", serialize(r.final_net)}};
    out << j.dump(2) << "\n";
    return 0;
  }
  out << to_string(r.sign) << "\n";
  if (o.explain) {
    int i = 0;
    for (const auto& step : r.trace.steps) out << describe(step, ++i);
    if (!r.context.empty()) {
      out << "holds for every value of:";
      for (const auto& c : r.context) out << " " << c;
      out << "\n";
    }
    for (const auto& n : r.notes) out << "note: " << n << "\n";
  }
  return 0;
}

int dsep(const Options& o, std::ostream& out) {
  Network net = load_network_file(o.network);
  SeparationQuery q{o.x, o.y, parse_given(o.given)};
  bool upper = D_separated(net, q);
  bool lower = d_separated(net, q);
  if (o.json_out) {
    json j = {{"command", "dsep"},
              {"x", q.x},
              {"y", q.y},
              {"given", q.given},
              {"D_separated", upper},
              {"d_separated", lower},
              {"closure", functional_closure(net, q.given)}};
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "D-separated: " << (upper ? "true" : "false")
      << ", d-separated: " << (lower ? "true" : "false") << "\n";
  return 0;
}

int transform(const Options& o, std::ostream& out) {
  Network net = load_network_file(o.network);
  TransformOp op = parse_op(o.op);
  Trace trace;
  Network result;
  switch (op.kind) {
    case OpKind::Reverse: {
      auto r = reverse_arc(net, op.node, op.target);
      trace.steps.push_back(r.step);
      result = r.net;
      break;
    }
    case OpKind::Propagate: {
      auto r = propagate_deterministic(net, op.node);
      trace.steps.push_back(r.step);
      result = r.net;
      break;
    }
    case OpKind::RemoveBarren: {
      auto r = remove_barren(net, op.node);
      trace.steps.push_back(r.step);
      result = r.net;
      break;
    }
    case OpKind::Reduce: {
      auto r = reduce_node(net, op.node);
      trace = r.trace;
      result = r.net;
      break;
    }
  }
  if (o.json_out) {
    json j = {{"command", "transform"},
              {"op", op.to_string()},
              {"trace", to_json(trace)},
              {"network", serialize(result)}};
    out << j.dump(2) << "\n";
    return 0;
  }
  int i = 0;
  for (const auto& step : trace.steps) out << describe(step, ++i);
  out << serialize(result);
  return 0;
}

int oracle(const Options& o, std::ostream& out) {
  Network net = load_network_file(o.network);
  OracleConfig cfg;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.strict_margin = o.margin;
  cfg.tolerance = o.tolerance;
  cfg.cardinalities = parse_cards(o.cards);
  if (cfg.trials < 1) throw UsageError("--trials must be at least 1");

  const bool is_influence = !o.from.empty() || !o.to.empty();
  const bool is_synergy = !o.a.empty() || !o.b.empty() || !o.child.empty();
  if (is_influence == is_synergy)
    throw UsageError(
        "oracle needs either --from/--to or --a/--b/--child");
  OracleVerdict v;
  if (is_influence) {
    if (o.from.empty() || o.to.empty())
      throw UsageError("oracle needs both --from and --to");
    v = soundness_report(net, InfluenceQuery{o.from, o.to, parse_given(o.given)},
                         cfg);
  } else {
    if (o.a.empty() || o.b.empty() || o.child.empty())
      throw UsageError("oracle needs --a, --b and --child");
    v = soundness_report(
        net, SynergyQuery{o.a, o.b, o.child, parse_given(o.given)}, cfg);
  }

  if (o.json_out) {
    json records = json::array();
    for (const auto& r : v.records)
      records.push_back({{"seed", r.seed},
                         {"trial", r.trial},
                         {"consistent", r.consistent},
                         {"worst_margin", r.worst_margin},
                         {"skipped_contexts", r.skipped_contexts}});
    json violations = json::array();
    for (const auto& x : v.violations)
      violations.push_back({{"seed", x.seed},
                            {"trial", x.trial},
                            {"assignment", x.assignment},
                            {"observed", x.observed}});
    json support = json::object();
    for (const auto& [s, n] : v.support) support[sign_str(s)] = n;
    json j = {{"command", "oracle"},
              {"query", v.query},
              {"engine_sign", sign_str(v.engine_sign)},
              {"trials_run", v.trials_run},
              {"seed", cfg.seed},
              {"sound", v.sound()},
              {"vacuous", v.vacuous()},
              {"records", records},
              {"violations", violations},
              {"support", support}};
    out << j.dump(2) << "\n";
    return v.sound() ? 0 : 1;
  }
  out << "query: " << v.query << "\n";
  out << "engine answer: " << to_string(v.engine_sign) << "\n";
  if (v.vacuous()) {
    out << "vacuously sound over " << v.trials_run << " trials; samples that "
        << "would have supported a stronger sign:";
    for (Sign s : {Sign::Plus, Sign::Minus, Sign::Zero}) {
      auto it = v.support.find(s);
      out << " " << to_string(s) << " " << (it == v.support.end() ? 0 : it->second)
          << "/" << v.trials_run;
    }
    out << "\n";
    return 0;
  }
  out << "trials: " << v.trials_run << ", violations: " << v.violations.size()
      << "\n";
  for (const auto& x : v.violations)
    out << "  seed " << x.seed << " trial " << x.trial << ": " << x.assignment
        << ": " << x.observed << "\n";
  return v.sound() ? 0 : 1;
}

int export_dot(const Options& o, std::ostream& out) {
  out << to_dot(load_network_file(o.network));
  return 0;
}

int validate_cmd(const Options& o, std::ostream& out) {
  Network net = load_network_file(o.network);
  auto problems = validate(net);
  if (o.json_out) {
    json list = json::array();
    for (const auto& p : problems)
      list.push_back({{"rule", p.rule}, {"element", p.element}});
    out << json{{"command", "validate"},
                {"valid", problems.empty()},
                {"summary", net.summary()},
                {"violations", list}}
               .dump(2)
        << "\n";
  } else if (problems.empty()) {
    out << "valid: " << net.summary() << "\n";
  } else {
    for (const auto& p : problems) out << p.rule << ": " << p.element << "\n";
  }
  return problems.empty() ? 0 : 1;
}

std::string hint_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e))
    return "fix the network file at the reported line and column";
  if (dynamic_cast<const ValidationError*>(&e))
    return "run `validate` on the network and fix the listed rule";
  if (dynamic_cast<const PreconditionError*>(&e))
    return "check the node names and query flags against the network";
  if (dynamic_cast<const OracleError*>(&e))
    return "shrink the network or lower --card so it can be enumerated";
  return "check that the network file exists and is readable";
}

void report(std::ostream& err, bool json_out, int status,
            const std::string& message, const std::string& hint) {
  if (json_out) {
    err << json{{"error", message}, {"hint", hint}, {"status", status}}.dump()
        << "\n";
  } else {
    err << "error: " << message << "\n" << "hint: " << hint << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Qualitative probabilistic network engine", "qpn"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.json_out, "Emit one machine-readable JSON document");

  auto net_arg = [&](CLI::App* sub) {
    sub->add_option("network", o.network, "Network file")->required();
  };
  auto given = [&](CLI::App* sub) {
    sub->add_option("--given", o.given, "Comma-separated conditioning nodes");
  };

  auto* qi = app.add_subcommand("query-influence", "Sign of an influence");
  net_arg(qi);
  qi->add_option("--from", o.from, "Source node")->required();
  qi->add_option("--to", o.to, "Target node")->required();
  given(qi);
  qi->add_flag("--explain", o.explain, "Print the transformation trace");

  auto* qs = app.add_subcommand("query-synergy", "Sign of a pairwise synergy");
  net_arg(qs);
  qs->add_option("--a", o.a, "First member of the pair")->required();
  qs->add_option("--b", o.b, "Second member of the pair")->required();
  qs->add_option("--child", o.child, "Child node")->required();
  given(qs);
  qs->add_flag("--explain", o.explain, "Print the reduction trace");

  auto* ds = app.add_subcommand("dsep", "d-separation and D-separation");
  net_arg(ds);
  ds->add_option("--x", o.x, "First node")->required();
  ds->add_option("--y", o.y, "Second node")->required();
  given(ds);

  auto* tr = app.add_subcommand("transform", "Apply one graph operation");
  net_arg(tr);
  tr->add_option("--op", o.op, "reverse:c,d | dnp:c | reduce:c | barren:c")
      ->required();

  auto* orc = app.add_subcommand("oracle", "Check an answer numerically");
  net_arg(orc);
  orc->add_option("--from", o.from, "Influence source");
  orc->add_option("--to", o.to, "Influence target");
  orc->add_option("--a", o.a, "Synergy pair member");
  orc->add_option("--b", o.b, "Synergy pair member");
  orc->add_option("--child", o.child, "Synergy child");
  given(orc);
  orc->add_option("--trials", o.trials, "Sampled parameterizations")
      ->capture_default_str();
  orc->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  orc->add_option("--card", o.cards, "Cardinality as node=k (repeatable)");
  orc->add_option("--margin", o.margin, "Strictness margin")
      ->capture_default_str();
  orc->add_option("--tolerance", o.tolerance, "Equality tolerance")
      ->capture_default_str();

  auto* dot = app.add_subcommand("export-dot", "Graphviz rendering");
  net_arg(dot);
  auto* val = app.add_subcommand("validate", "Check a network file");
  net_arg(val);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, o.json_out, 2, e.what(), "run with --help for usage");
    return 2;
  }

  try {
    if (qi->parsed()) return influence(o, out);
    if (qs->parsed()) return synergy(o, out);
    if (ds->parsed()) return dsep(o, out);
    if (tr->parsed()) return transform(o, out);
    if (orc->parsed()) return oracle(o, out);
    if (dot->parsed()) return export_dot(o, out);
    return validate_cmd(o, out);
  } catch (const UsageError& e) {
    report(err, o.json_out, 2, e.what(), "run with --help for usage");
    return 2;
  } catch (const Error& e) {
    report(err, o.json_out, 1, e.what(), hint_for(e));
    return 1;
  }
}

}  // namespace qpn::cli
