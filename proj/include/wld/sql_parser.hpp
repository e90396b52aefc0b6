#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wld/sql_lexer.hpp"

namespace wld::sql {

enum class Clause { Select, From, Join, Where, GroupBy, Having, OrderBy };
enum class Aggregate { Avg, Sum, Count, Min, Max };

std::string_view to_string(Clause clause);     // SELECT, FROM, ..., GROUPBY, ORDERBY
std::string_view to_string(Aggregate function);  // AVG, SUM, ...

struct TableRef {
  std::string name;   // table, entity or join path; empty for a derived table
  std::string alias;  // empty when none
  Clause clause = Clause::From;
  std::optional<std::size_t> derived;  // index into QueryAst::subqueries
  std::size_t offset = 0;
};

struct ColumnRef {
  std::string text;  // as written, lower-cased
  Clause clause = Clause::Select;
  std::optional<Aggregate> aggregate;  // innermost enclosing aggregate call
  std::size_t offset = 0;

  // Filled by resolve_aliases.
  bool resolved = false;
  bool unresolved = false;
  bool output_alias = false;  // refers to a select-list alias; carries no feature
  std::string table;
  std::string column;  // empty for a whole-entity reference

  std::string qualified() const { return column.empty() ? table : table + "." + column; }
};

struct SelectItem {
  std::string output_name;             // alias, or last path segment of a plain column
  std::optional<std::size_t> column;   // index into columns when the item is a plain column
};

struct QueryAst;

struct Subquery;

struct QueryAst {
  std::vector<Clause> clauses;  // distinct, in order of first appearance
  std::vector<TableRef> tables;
  std::map<std::string, std::string> alias_table;
  std::vector<SelectItem> select_items;
  std::vector<ColumnRef> columns;
  std::vector<Subquery> subqueries;
  std::size_t unresolved_count = 0;  // this scope only

  bool has(Clause c) const;
  /// (function, qualified column) pairs of this scope, in source order.
  std::vector<std::pair<Aggregate, std::string>> function_calls() const;
  /// Unresolved references over the whole tree.
  std::size_t total_unresolved() const;
};

struct Subquery {
  Clause host = Clause::Where;
  QueryAst query;
};

/// Parses one SELECT statement (SQL or HQL). Throws SqlError.
QueryAst parse(const std::vector<SqlToken>& tokens);

/// Rewrites table names and column references to base table names, innermost
/// scope first. References that cannot be attributed to exactly one table are
/// put under the pseudo table "?unresolved".
QueryAst resolve_aliases(QueryAst ast);

}  // namespace wld::sql
