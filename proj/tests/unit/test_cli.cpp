#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "support/toy.hpp"
#include "wld/cli.hpp"
#include "wld/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wld");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = wld::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int binary(const std::string& args) {
  const std::string cmd = std::string(WLD_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("wld_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string kToy = toy::data_path("toy");

}  // namespace

TEST_CASE("split statements") {
  auto s = wld::split_sql_statements("select a from t; -- x; y\nselect 'a;b' from u;;  /* ; */ ");
  REQUIRE(s.size() == 2);
  CHECK(s[1].find("'a;b'") != std::string::npos);
}

TEST_CASE("parse writes a one-row matrix for the sample query") {
  fs::path dir = scratch("parse");
  Run r = cli({"parse", "--input", toy::data_path("sample_query_fixed.sql"), "--out", dir.string()});
  CHECK(r.code == 0);
  json report = json::parse(wld::read_text_file((dir / "parse_report.json").string()));
  CHECK(report["accepted"] == 1);
  CHECK(report["rejected"] == 0);
  for (const char* f : {"features.coo", "features.dict.csv", "rejects.jsonl"}) CHECK(fs::exists(dir / f));
  std::string coo = wld::read_text_file((dir / "features.coo").string());
  CHECK(coo.find("0,FROM_model,1") != std::string::npos);
  CHECK(coo.find("\n1,") == std::string::npos);
}

TEST_CASE("parse exit codes") {
  fs::path dir = scratch("parse_codes");
  write(dir / "empty.sql", "");
  CHECK(cli({"parse", "--input", (dir / "empty.sql").string(), "--out", (dir / "o1").string()}).code == 2);
  CHECK(cli({"parse", "--input", (dir / "missing.sql").string(), "--out", (dir / "o2").string()}).code == 1);

  // one good, one broken statement: partial success
  write(dir / "mixed.sql", "SELECT a FROM t WHERE b = 1;\nSELECT FROM WHERE (;\n");
  Run r = cli({"parse", "--input", (dir / "mixed.sql").string(), "--out", (dir / "o3").string()});
  CHECK(r.code == 0);
  json report = json::parse(wld::read_text_file((dir / "o3" / "parse_report.json").string()));
  CHECK(report["accepted"] == 1);
  CHECK(report["rejected"] == 1);
  CHECK(wld::read_text_file((dir / "o3" / "rejects.jsonl").string()).find("\"error\"") != std::string::npos);
}

TEST_CASE("stats on the toy dataset") {
  Run r = cli({"stats", "--dataset", kToy, "--json"});
  REQUIRE(r.code == 0);
  json s = json::parse(r.out);
  CHECK(s["n"] == 11);
  CHECK(s["m"] == 12);
  CHECK(s["nonzeros"] == 30);
  fs::path empty = scratch("empty_ds");
  CHECK(cli({"stats", "--dataset", empty.string()}).code == 1);
}

TEST_CASE("synth then stats reports the configured sparsity") {
  fs::path dir = scratch("synth");
  Run r = cli({"synth", "--n", "100", "--tables", "10", "--cols", "5", "--sparsity", "0.95", "--seed", "4", "--out",
               (dir / "a").string()});
  REQUIRE(r.code == 0);
  json s = json::parse(cli({"stats", "--dataset", (dir / "a").string(), "--json"}).out);
  CHECK(s["nonzeros"] == 250);
  CHECK(s["sparsity"].get<double>() == doctest::Approx(0.95));
  CHECK(fs::exists(dir / "a" / "synth.json"));

  cli({"synth", "--n", "100", "--seed", "4", "--out", (dir / "b").string()});
  cli({"synth", "--n", "100", "--seed", "4", "--out", (dir / "c").string()});
  for (const char* f : {"objects.csv", "columns.csv", "features.coo"}) {
    CHECK(wld::read_text_file((dir / "b" / f).string()) == wld::read_text_file((dir / "c" / f).string()));
  }
  CHECK(cli({"synth", "--sparsity", "1.5", "--seed", "1", "--out", (dir / "d").string()}).code == 2);
  CHECK(cli({"synth", "--out", (dir / "e").string()}).code == 2);  // seed required
}

TEST_CASE("mine on the toy dataset") {
  fs::path dir = scratch("mine");
  const std::string out = (dir / "r.json").string();
  Run r = cli({"mine", "--dataset", kToy, "--target", "slow", "--target-mode", "boolean", "--measure", "lift", "--k",
               "1", "--depth", "1", "--min-support", "3", "--out", out, "--quiet"});
  REQUIRE(r.code == 0);
  json res = json::parse(wld::read_text_file(out));
  CHECK(res["schema_version"] == 1);
  REQUIRE(res["subgroups"].size() == 1);
  CHECK(res["subgroups"][0]["pattern"] == "WHERE_Verrou.date > 0");
  CHECK(res["subgroups"][0]["objects"] == json::array({"o2", "o4", "o6", "o7"}));
  CHECK(fs::exists(dir / "r.manifest.json"));

  Run none = cli({"mine", "--dataset", kToy, "--target", "time", "--min-support", "50", "--out",
                  (dir / "e.json").string(), "--quiet"});
  CHECK(none.code == 0);
  CHECK(json::parse(wld::read_text_file((dir / "e.json").string()))["subgroups"].empty());

  Run bad = cli({"mine", "--dataset", kToy, "--target", "time", "--measure", "gini", "--out", (dir / "x.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("wracc") != std::string::npos);
  CHECK(cli({"mine", "--dataset", kToy, "--target", "nosuch", "--out", (dir / "y.json").string()}).code == 2);
}

TEST_CASE("manifest replay with different thread counts is byte-identical") {
  fs::path dir = scratch("replay");
  const std::string first = (dir / "r1.json").string();
  REQUIRE(cli({"mine", "--dataset", kToy, "--target", "time", "--measure", "mean_test", "--k", "10", "--depth", "3",
               "--min-support", "2", "--threads", "1", "--out", first, "--quiet"})
              .code == 0);
  const std::string second = (dir / "r2.json").string();
  REQUIRE(cli({"mine", "--from-manifest", (dir / "r1.manifest.json").string(), "--threads", "8", "--out", second,
               "--quiet"})
              .code == 0);
  CHECK(wld::read_text_file(first) == wld::read_text_file(second));
  json m = json::parse(wld::read_text_file((dir / "r2.manifest.json").string()));
  CHECK(m["threads"] == 8);
  CHECK(m["outputs"]["results_sha256"] ==
        json::parse(wld::read_text_file((dir / "r1.manifest.json").string()))["outputs"]["results_sha256"]);
}

TEST_CASE("dedup subcommand") {
  fs::path dir = scratch("dedup");
  const std::string in = (dir / "r.json").string();
  REQUIRE(cli({"mine", "--dataset", kToy, "--target", "time", "--measure", "mean_test", "--k", "10", "--depth", "2",
               "--min-support", "2", "--out", in, "--quiet"})
              .code == 0);
  const std::string g = (dir / "g.json").string();
  REQUIRE(cli({"dedup", "--in", in, "--out", g, "--mode", "greedy", "--theta", "0.5"}).code == 0);
  json gj = json::parse(wld::read_text_file(g));
  CHECK(gj["dedup"]["mode"] == "greedy");
  CHECK(gj["subgroups"].size() < 10);
  CHECK(gj["subgroups"][0]["rank"] == 1);

  const std::string h = (dir / "h.json").string();
  REQUIRE(cli({"dedup", "--in", in, "--out", h, "--mode", "hac", "--clusters", "4"}).code == 0);
  json hj = json::parse(wld::read_text_file(h));
  CHECK(hj["subgroups"].size() == 4);
  CHECK(hj["dedup"].contains("dendrogram"));
  CHECK(cli({"dedup", "--in", (dir / "missing.json").string(), "--mode", "greedy"}).code == 1);
  write(dir / "junk.json", "{not json");
  CHECK(cli({"dedup", "--in", (dir / "junk.json").string(), "--mode", "greedy"}).code == 1);
}

TEST_CASE("binary exit codes") {
  CHECK(binary("--help") == 0);
  CHECK(binary("mine --no-such-flag") == 2);
  CHECK(binary("frobnicate") == 2);
  CHECK(binary("stats --dataset /nonexistent/dir") == 1);
  CHECK(binary("stats --dataset " + kToy) == 0);
}
