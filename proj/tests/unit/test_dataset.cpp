#include <cmath>

#include "doctest.h"
#include "support/toy.hpp"
#include "wld/dataset.hpp"
#include "wld/dataset_build.hpp"
#include "wld/dataset_io.hpp"
#include "wld/errors.hpp"

using namespace wld;

namespace {

double num(const Value& v) { return std::get<double>(v); }
std::string str(const Value& v) { return std::get<std::string>(v); }

}  // namespace

TEST_CASE("toy dataset matches the hand-written table") {
  const Dataset& d = toy::dataset();
  REQUIRE(d.size() == 11);
  REQUIRE(d.attribute_count() == 12);
  const char* names[] = {"FROM_Verrou", "FROM_Cumulof", "WHERE_Verrou.ik", "WHERE_Verrou.date", "WHERE_Cumulof.ik",
                         "softVersion", "serverName",   "manyActiveSessions", "concurrence", "nrows", "time", "slow"};
  for (std::size_t j = 0; j < 12; ++j) CHECK(d.attribute(j).name == names[j]);

  // a1..a5 per object, straight from the table
  const int tokens[11][5] = {{1, 0, 1, 0, 0}, {1, 0, 1, 1, 0}, {0, 1, 0, 0, 1}, {1, 1, 0, 1, 1},
                             {1, 1, 1, 0, 1}, {1, 0, 1, 2, 0}, {1, 1, 1, 1, 1}, {0, 1, 0, 0, 1},
                             {1, 0, 1, 0, 0}, {0, 1, 0, 0, 1}, {0, 1, 0, 0, 0}};
  const char* version[] = {"v2", "v1", "v1", "v2", "v3", "v3", "v2", "v2", "v3", "v2", "v2"};
  const char* server[] = {"LYN", "BLV", "BLV", "LYN", "LYN", "LYN", "LYN", "BLV", "BLV", "BLV", "LYN"};
  const char* alert[] = {"Alarm", "Critical", "Critical", "Alarm", "Alarm", "Critical",
                         "Info",  "Alarm",    "Critical", "Alarm", "Info"};
  const double conc[] = {22, 3, 15, 31, 11, 6, 27, 9, 10, 7, 25};
  const double nrows[] = {10, 1, 27, 12, 25, 100, 1, 37, 112, 1, 16};
  const double time[] = {2.15, 15.81, 1.14, 10.87, 2.1, 17.93, 15.8, 9.95, 8.95, 14.7, 1.0};
  const double slow[] = {0, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0};
  for (std::size_t i = 0; i < 11; ++i) {
    const std::string id = "o" + std::to_string(i + 1);
    CAPTURE(id);
    CHECK(d.object_id(i) == id);
    for (std::size_t j = 0; j < 5; ++j) CHECK(num(d.value(j, i)) == tokens[i][j]);
    CHECK(str(d.value("softVersion", id)) == version[i]);
    CHECK(str(d.value("serverName", id)) == server[i]);
    CHECK(str(d.value("manyActiveSessions", id)) == alert[i]);
    CHECK(num(d.value("concurrence", id)) == conc[i]);
    CHECK(num(d.value("nrows", id)) == nrows[i]);
    CHECK(num(d.value("time", id)) == time[i]);
    CHECK(num(d.value("slow", id)) == slow[i]);
  }
}

TEST_CASE("attribute kinds and provenance") {
  const Dataset& d = toy::dataset();
  CHECK(d.attribute(0).source == Provenance::QueryToken);
  CHECK(d.is_sparse(0));
  CHECK(d.attribute(5).kind == AttributeKind::Nominal);
  CHECK(d.attribute(7).kind == AttributeKind::Ordinal);
  CHECK(d.attribute(7).categories == std::vector<std::string>{"Info", "Alarm", "Critical", "Blocking"});
  CHECK(d.attribute(8).source == Provenance::Ash);
  CHECK(d.attribute(11).kind == AttributeKind::Boolean);
}

TEST_CASE("value lookup errors") {
  const Dataset& d = toy::dataset();
  CHECK_THROWS_AS(d.value("nope", "o1"), DatasetError);
  CHECK_THROWS_AS(d.value("time", "o99"), DatasetError);
  try {
    d.attribute_index("nope");
  } catch (const DatasetError& e) {
    CHECK(e.kind() == DatasetErrorKind::UnknownAttribute);
  }
}

TEST_CASE("filter builds views that share storage") {
  const Dataset& d = toy::dataset();
  Dataset lyn = d.filter({parse_predicate("serverName = LYN")});
  CHECK(lyn.size() == 6);
  CHECK(lyn.is_view());
  CHECK(lyn.object_id(0) == "o1");
  CHECK(num(lyn.value("time", "o6")) == 17.93);

  Dataset slowish = lyn.filter({parse_predicate("time >= 10")});
  CHECK(slowish.size() == 3);  // o4, o6, o7

  Dataset by_id = d.filter({}, std::vector<std::string>{"o3", "o1"});
  CHECK(by_id.size() == 2);
  CHECK(by_id.object_id(0) == "o1");

  CHECK(d.filter({parse_predicate("manyActiveSessions >= Critical")}).size() == 4);
  CHECK(d.filter({}).size() == 11);
}

TEST_CASE("filter errors") {
  const Dataset& d = toy::dataset();
  try {
    d.filter({parse_predicate("time > 100")});
    FAIL("expected EmptySubset");
  } catch (const DatasetError& e) {
    CHECK(e.kind() == DatasetErrorKind::EmptySubset);
  }
  CHECK_THROWS_AS(d.filter({parse_predicate("serverName > LYN")}), DatasetError);
  CHECK_THROWS_AS(d.filter({parse_predicate("time > fast")}), DatasetError);
  CHECK_THROWS_AS(parse_predicate("time"), DatasetError);
}

TEST_CASE("targets") {
  const Dataset& d = toy::dataset();
  Target t = derive_target(d, {TargetMode::Thresholded, "time", 10.0, {}});
  CHECK(t.binary);
  double pos = 0;
  for (double v : t.values) pos += v;
  CHECK(pos == 5);  // same objects as `slow`

  Target sel = derive_target(d, {TargetMode::SelectionLabeled, "", std::nullopt, {"o2", "o4"}});
  CHECK(sel.values[1] == 1.0);
  CHECK(sel.values[0] == 0.0);

  Target all = derive_target(d, {TargetMode::Thresholded, "time", 0.0, {}});
  CHECK(all.degenerate);
  CHECK(all.warnings.size() == 1);

  CHECK_THROWS_AS(derive_target(d, {TargetMode::NumericAttribute, "serverName", std::nullopt, {}}), DatasetError);
  CHECK_THROWS_AS(derive_target(d, {TargetMode::BooleanAttribute, "time", std::nullopt, {}}), DatasetError);
  CHECK_THROWS_AS(derive_target(d, {TargetMode::Thresholded, "time", std::nullopt, {}}), DatasetError);
  CHECK_THROWS_AS(derive_target(d, {TargetMode::SelectionLabeled, "", std::nullopt, {"o42"}}), DatasetError);
}

TEST_CASE("summary of the toy dataset") {
  DatasetSummary s = summarize(toy::dataset());
  CHECK(s.n == 11);
  CHECK(s.m == 12);
  CHECK(s.token_columns == 5);
  CHECK(s.nonzeros == 30);
  CHECK(s.clause_counts.at("FROM") == 2);
  CHECK(s.clause_counts.at("WHERE") == 3);
  CHECK(s.sparsity == doctest::Approx(1.0 - 30.0 / 55.0));
}

TEST_CASE("save and load round trip keeps every value and the digest is stable") {
  const std::string dir = "/tmp/wld_test_roundtrip";
  const Dataset& d = toy::dataset();
  save_dataset(d, dir);
  Dataset back = load_dataset(dir);
  REQUIRE(back.size() == d.size());
  REQUIRE(back.attribute_count() == d.attribute_count());
  for (std::size_t j = 0; j < d.attribute_count(); ++j) {
    CHECK(back.attribute(j).name == d.attribute(j).name);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back.value(j, i) == d.value(j, i));
  }
  CHECK(dataset_digest(dir) == dataset_digest(toy::data_path("toy")));

  save_dataset(d.filter({parse_predicate("serverName = BLV")}), dir);
  CHECK(load_dataset(dir).size() == 5);
}

TEST_CASE("unknown values survive a round trip") {
  std::vector<Attribute> attrs = {{"x", AttributeKind::Numeric, {}, Provenance::Meta},
                                  {"c", AttributeKind::Nominal, {"a", "b"}, Provenance::Env}};
  std::vector<ColumnData> cols = {DenseColumn{{1.0, std::nan("")}}, CodeColumn{{-1, 1}}};
  Dataset d({"p", "q"}, attrs, cols);
  CHECK(str(d.value(1, 0)) == "unknown");
  save_dataset(d, "/tmp/wld_test_unknowns");
  Dataset back = load_dataset("/tmp/wld_test_unknowns");
  CHECK(std::isnan(back.number(0, 1)));
  CHECK(back.code(1, 0) == -1);
  CHECK(back.code(1, 1) == 1);
}

TEST_CASE("loading a missing directory is an I/O error") {
  CHECK_THROWS_AS(load_dataset("/tmp/definitely/not/here"), IoError);
}

TEST_CASE("column headers and timestamps") {
  auto h = parse_column_header("softVersion:nominal{v1|v2}");
  CHECK(h.name == "softVersion");
  CHECK(*h.kind == AttributeKind::Nominal);
  CHECK(h.declared == std::vector<std::string>{"v1", "v2"});
  CHECK_FALSE(parse_column_header("envId").kind.has_value());
  CHECK(*parse_timestamp("1970-01-01T00:01:00Z") == 60.0);
  CHECK(*parse_timestamp("86400") == 86400.0);
  CHECK(*parse_timestamp("2021-03-01T09:00:00.5") - *parse_timestamp("2021-03-01T09:00:00") == 0.5);
  CHECK_FALSE(parse_timestamp("yesterday").has_value());
}

TEST_CASE("duplicate env keys are rejected") {
  QueryLog log = parse_query_log("query,envId,time,nrows\nselect a from t,E1,1,1\n");
  std::vector<ClauseTokenMap> feats = {{{"FROM_t", 1}}};
  csv::Table env = csv::parse("envId,softVersion:nominal\nE1,v1\nE1,v2\n");
  BuildInputs in;
  in.queries = &log;
  in.features = &feats;
  in.env = &env;
  BuildOptions opt;
  opt.join_key = {"envId"};
  try {
    build_dataset(in, opt);
    FAIL("expected DuplicateKey");
  } catch (const DatasetError& e) {
    CHECK(e.kind() == DatasetErrorKind::DuplicateKey);
  }
}
