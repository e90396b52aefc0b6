#include "doctest.h"
#include "wld/errors.hpp"
#include "wld/search.hpp"
#include "wld/synth.hpp"

using namespace wld;

namespace {

std::size_t token_nonzeros(const Dataset& d) {
  std::size_t nnz = 0;
  for (std::size_t j = 0; j < d.attribute_count(); ++j) {
    if (d.attribute(j).source == Provenance::QueryToken) nnz += d.sparse_nonzeros(j);
  }
  return nnz;
}

}  // namespace

TEST_CASE("exact nonzero count and sparsity") {
  SynthConfig c;
  c.n = 100;
  c.tables = 10;
  c.cols = 5;
  c.sparsity = 0.95;
  SynthOutput out = synthesize(c);
  CHECK(out.data.size() == 100);
  CHECK(token_nonzeros(out.data) == 250);
  DatasetSummary s = summarize(out.data);
  CHECK(s.token_columns == 50);
  CHECK(s.nonzeros == 250);
  CHECK(s.sparsity == doctest::Approx(0.95));
}

TEST_CASE("columns and token names") {
  SynthOutput out = synthesize({});
  const Dataset& d = out.data;
  CHECK(d.find_attribute("serverName").has_value());
  CHECK(d.find_attribute("nrows").has_value());
  CHECK(d.find_attribute("time").has_value());
  CHECK(d.attribute(0).name == token_name(0, 0));
  CHECK(token_name(0, 0) == "WHERE_t1.c1");
  CHECK(out.planted_token == token_name(0, 0));
  CHECK(out.planted_selector == out.planted_token + " > 0");
  CHECK(out.planted_support == d.sparse_nonzeros(0));
  for (double v : d.numbers(d.attribute_index("time"))) CHECK(v >= 0.0);
}

TEST_CASE("same seed gives the same data") {
  SynthConfig c;
  c.n = 300;
  c.seed = 9;
  SynthOutput a = synthesize(c), b = synthesize(c);
  for (std::size_t j = 0; j < a.data.attribute_count(); ++j) {
    CHECK(a.data.numbers(j) == b.data.numbers(j));
  }
  c.seed = 10;
  SynthOutput other = synthesize(c);
  bool differs = false;
  for (std::size_t j = 0; j < a.data.attribute_count(); ++j) differs |= a.data.numbers(j) != other.data.numbers(j);
  CHECK(differs);
}

TEST_CASE("sparsity zero is dense") {
  SynthConfig c;
  c.n = 20;
  c.tables = 2;
  c.cols = 3;
  c.sparsity = 0.0;
  SynthOutput out = synthesize(c);
  CHECK(token_nonzeros(out.data) == 120);
  for (std::size_t j = 0; j < 6; ++j) {
    for (double v : out.data.numbers(j)) CHECK(v >= 1.0);
  }
}

TEST_CASE("infeasible configurations") {
  SynthConfig c;
  c.sparsity = 1.0;
  CHECK_THROWS_AS(synthesize(c), ConfigError);
  c.sparsity = -0.1;
  CHECK_THROWS_AS(synthesize(c), ConfigError);
  c = {};
  c.n = 0;
  CHECK_THROWS_AS(synthesize(c), ConfigError);
  c = {};
  c.planted_column = c.tables * c.cols;
  CHECK_THROWS_AS(synthesize(c), ConfigError);
}

TEST_CASE("planted token ranks first under mean_test") {
  SynthConfig c;
  c.n = 1000;
  c.seed = 3;
  SynthOutput out = synthesize(c);
  Target t = derive_target(out.data, {TargetMode::NumericAttribute, "time"});
  SearchConfig sc;
  sc.measure = parse_measure("mean_test");
  sc.k = 5;
  sc.depth = 2;
  ResultSet rs = mine(out.data, t, sc);
  REQUIRE_FALSE(rs.entries.empty());
  CHECK(rs.entries[0].text == out.planted_selector);
}

TEST_CASE("noise model has no planted token") {
  SynthConfig c;
  c.target_model = TargetModel::Noise;
  SynthOutput out = synthesize(c);
  CHECK(out.planted_token.empty());
  CHECK(out.planted_selector.empty());
}
