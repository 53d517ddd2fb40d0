#include "cli.hpp"

#include <json.hpp>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

using qpn::testing::fixture;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = qpn::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("query-influence on the deterministic shortcut net") {
  auto r = run({"query-influence", fixture("shortcut_det.qpn"), "--from", "z",
                "--to", "y", "--given", "x"});
  CHECK(r.code == 0);
  CHECK(r.out == "+\n");
}

TEST_CASE("query-influence explain") {
  auto r = run({"query-influence", fixture("shortcut_prob.qpn"), "--from", "z",
                "--to", "y", "--given", "x", "--explain"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("?\n", 0) == 0);
  CHECK(r.out.find("case V") != std::string::npos);
}

TEST_CASE("dsep") {
  auto r = run({"dsep", fixture("fork_det.qpn"), "--x", "x", "--y", "y",
                "--given", "z"});
  CHECK(r.code == 0);
  CHECK(r.out == "D-separated: true, d-separated: false\n");
}

TEST_CASE("validate") {
  auto bad = run({"validate", fixture("broken_cycle.qpn")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("cycle") != std::string::npos);
  CHECK(run({"validate", fixture("tax.qpn")}).code == 0);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"query-influence", fixture("shortcut_det.qpn")}).code == 2);
  CHECK(run({"transform", fixture("shortcut_det.qpn"), "--op", "spin:w"}).code ==
        2);
}

TEST_CASE("missing file is a domain error") {
  auto r = run({"validate", "/nonexistent/net.qpn"});
  CHECK(r.code == 1);
  CHECK(r.err.find("hint:") != std::string::npos);
}

TEST_CASE("json output parses") {
  auto r = run({"--json", "query-influence", fixture("shortcut_det.qpn"), "--from",
                "z", "--to", "y", "--given", "x"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["sign"] == "+");
  CHECK(j["trace"].size() == 2);

  auto d = nlohmann::json::parse(run({"--json", "dsep", fixture("fork_det.qpn"),
                                      "--x", "x", "--y", "y", "--given", "z"})
                                     .out);
  CHECK(d["D_separated"] == true);
  CHECK(d["d_separated"] == false);
}

TEST_CASE("oracle subcommand is reproducible") {
  std::vector<std::string> args = {"--json",  "oracle", fixture("tax_progressive.qpn"),
                                   "--a",     "salary", "--b",
                                   "interest", "--child", "taxes",
                                   "--trials", "5",     "--seed",
                                   "7"};
  auto a = run(args);
  auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["sound"] == true);
  CHECK(j["trials_run"] == 5);
}

TEST_CASE("transform and export") {
  auto t = run({"transform", fixture("shortcut_det.qpn"), "--op", "dnp:w"});
  CHECK(t.code == 0);
  CHECK(t.out.find("edge z y +") != std::string::npos);
  auto d = run({"export-dot", fixture("fork_det.qpn")});
  CHECK(d.code == 0);
  CHECK(d.out.find("peripheries=2") != std::string::npos);
}

TEST_CASE("synergy query") {
  auto r = run({"query-synergy", fixture("tax_regressive.qpn"), "--a", "salary",
                "--b", "interest", "--child", "taxes"});
  CHECK(r.code == 0);
  CHECK(r.out == "-\n");
}
