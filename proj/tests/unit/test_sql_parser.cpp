#include <algorithm>
#include <string>

#include "doctest.h"
#include "support/toy.hpp"
#include "wld/sql_parser.hpp"

using namespace wld::sql;

namespace {

QueryAst parsed(const std::string& q) { return parse(tokenize(q)); }
QueryAst resolved(const std::string& q) { return resolve_aliases(parsed(q)); }

SqlErrorKind parse_error(const std::string& q, std::size_t* offset = nullptr) {
  try {
    parsed(q);
  } catch (const SqlError& e) {
    if (offset) *offset = e.offset();
    return e.kind();
  }
  FAIL("accepted: " << q);
  return SqlErrorKind::UnterminatedInput;
}

}  // namespace

TEST_CASE("sample query structure") {
  QueryAst ast = resolved(toy::sample_query_fixed());
  CHECK(ast.alias_table == std::map<std::string, std::string>{{"m", "model"}, {"p", "prod"}});
  for (Clause c : {Clause::Select, Clause::From, Clause::Join, Clause::Where, Clause::GroupBy, Clause::Having}) {
    CHECK(ast.has(c));
  }
  CHECK_FALSE(ast.has(Clause::OrderBy));
  CHECK(ast.subqueries.empty());
  std::vector<std::pair<Aggregate, std::string>> calls = {
      {Aggregate::Count, "prod.ik"}, {Aggregate::Sum, "model.nbembal"}, {Aggregate::Max, "prod.nbembal"}};
  CHECK(ast.function_calls() == calls);
}

TEST_CASE("minimal query") {
  QueryAst ast = resolved("SELECT a FROM t");
  CHECK(ast.alias_table.empty());
  CHECK(ast.subqueries.empty());
  REQUIRE(ast.columns.size() == 1);
  CHECK(ast.columns[0].qualified() == "t.a");
}

TEST_CASE("derived table is a child hosted in FROM") {
  QueryAst ast = resolved("SELECT x FROM (SELECT x FROM t) s");
  REQUIRE(ast.subqueries.size() == 1);
  CHECK(ast.subqueries[0].host == Clause::From);
  REQUIRE(ast.tables.size() == 1);
  CHECK(ast.tables[0].derived == std::optional<std::size_t>{0});
  CHECK(ast.tables[0].alias == "s");
  CHECK(ast.subqueries[0].query.columns[0].qualified() == "t.x");
  CHECK(ast.columns[0].qualified() == "t.x");
  CHECK(ast.alias_table.count("s") == 0);
}

TEST_CASE("alias resolution") {
  QueryAst ast = resolved("select m.uex from model m");
  CHECK(ast.columns[0].qualified() == "model.uex");
  ast = resolved("select a, b from t1, t2");
  CHECK(ast.columns[0].qualified() == "?unresolved.a");
  CHECK(ast.columns[0].unresolved);
  CHECK(ast.total_unresolved() == 2);
  ast = resolved("select t1.a from t1, t2");
  CHECK(ast.columns[0].qualified() == "t1.a");
}

TEST_CASE("innermost scope first") {
  // `m` is rebound inside the subquery.
  QueryAst ast = resolved("select m.a from model m where m.b in (select m.c from other m)");
  CHECK(ast.columns[0].qualified() == "model.a");
  CHECK(ast.columns[1].qualified() == "model.b");
  CHECK(ast.subqueries[0].query.columns[0].qualified() == "other.c");
  // correlated reference to the outer alias
  ast = resolved("select m.a from model m where exists (select 1 from prod p where p.ik = m.ik)");
  const auto& inner = ast.subqueries[0].query;
  CHECK(inner.columns[0].qualified() == "prod.ik");
  CHECK(inner.columns[1].qualified() == "model.ik");
  CHECK(ast.subqueries[0].host == Clause::Where);
}

TEST_CASE("hql join fetch on an alias path") {
  QueryAst ast = resolved("from Lot l join fetch l.prod p where p.ref = :r");
  CHECK(ast.tables[1].clause == Clause::Join);
  CHECK(ast.tables[1].name == "lot.prod");
  CHECK(ast.columns[0].qualified() == "lot.prod.ref");
}

TEST_CASE("join on condition columns are tagged JOIN") {
  QueryAst ast = resolved("select a.x from a join b on a.id = b.id left outer join c on c.k = b.k");
  std::vector<Clause> tags;
  for (auto& c : ast.columns) tags.push_back(c.clause);
  CHECK(tags == std::vector<Clause>{Clause::Select, Clause::Join, Clause::Join, Clause::Join, Clause::Join});
}

TEST_CASE("select-list aliases in order by are not columns") {
  QueryAst ast = resolved("select sum(t.v) as total, t.k from t group by t.k order by total desc");
  auto alias_refs = std::count_if(ast.columns.begin(), ast.columns.end(), [](auto& c) { return c.output_alias; });
  CHECK(alias_refs == 1);
}

TEST_CASE("grammar coverage") {
  const char* ok[] = {
      "select distinct a from t where b between 1 and 2 and c like 'x%' and d is not null",
      "select case when a > 1 then b else c end from t",
      "select a from t where b in (1, 2, 3) or c not in (select c from u)",
      "select count(*) from t",
      "select a from t where b = any (select b from u)",
      "select a from t union all select a from u order by a",
      "select new Foo(l.a, l.b) from Lot l",
      "select a from t order by a nulls last",
      "select cast(a as varchar(10)) from t",
      "select x from t;",
  };
  for (const char* q : ok) {
    INFO(std::string(q));
    CHECK_NOTHROW(resolved(q));
  }
}

TEST_CASE("rejections") {
  CHECK(parse_error("update t set a = 1") == SqlErrorKind::UnsupportedStatement);
  CHECK(parse_error("delete from t") == SqlErrorKind::UnsupportedStatement);
  std::size_t off = 0;
  CHECK(parse_error("select a from t where", &off) == SqlErrorKind::SyntaxError);
  CHECK(off == 21);
  CHECK(parse_error("select a from t where a = = 1", &off) == SqlErrorKind::SyntaxError);
  CHECK(off == 26);
  CHECK(parse_error("select a from t limit 5") == SqlErrorKind::SyntaxError);
  CHECK(parse_error("a b c") == SqlErrorKind::SyntaxError);
}
