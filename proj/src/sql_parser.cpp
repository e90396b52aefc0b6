#include "wld/sql_parser.hpp"

#include <algorithm>

namespace wld::sql {

std::string_view to_string(Clause clause) {
  switch (clause) {
    case Clause::Select: return "SELECT";
    case Clause::From: return "FROM";
    case Clause::Join: return "JOIN";
    case Clause::Where: return "WHERE";
    case Clause::GroupBy: return "GROUPBY";
    case Clause::Having: return "HAVING";
    case Clause::OrderBy: return "ORDERBY";
  }
  return "?";
}

std::string_view to_string(Aggregate function) {
  switch (function) {
    case Aggregate::Avg: return "AVG";
    case Aggregate::Sum: return "SUM";
    case Aggregate::Count: return "COUNT";
    case Aggregate::Min: return "MIN";
    case Aggregate::Max: return "MAX";
  }
  return "?";
}

bool QueryAst::has(Clause c) const { return std::find(clauses.begin(), clauses.end(), c) != clauses.end(); }

std::vector<std::pair<Aggregate, std::string>> QueryAst::function_calls() const {
  std::vector<std::pair<Aggregate, std::string>> out;
  for (const auto& col : columns) {
    if (col.aggregate && !col.output_alias) out.emplace_back(*col.aggregate, col.resolved ? col.qualified() : col.text);
  }
  return out;
}

std::size_t QueryAst::total_unresolved() const {
  std::size_t n = unresolved_count;
  for (const auto& sq : subqueries) n += sq.query.total_unresolved();
  return n;
}

namespace {

std::optional<Aggregate> aggregate_of(std::string_view name) {
  if (name == "avg") return Aggregate::Avg;
  if (name == "sum") return Aggregate::Sum;
  if (name == "count") return Aggregate::Count;
  if (name == "min") return Aggregate::Min;
  if (name == "max") return Aggregate::Max;
  return std::nullopt;
}

bool is_dml_or_ddl(std::string_view kw) {
  static constexpr std::string_view words[] = {"insert", "update", "delete", "merge", "create",
                                               "drop",   "alter",  "truncate", "with", "set"};
  return std::find(std::begin(words), std::end(words), kw) != std::end(words);
}

struct ExprInfo {
  std::optional<std::size_t> column;  // set when the expression is exactly one column reference
};

class Parser {
 public:
  explicit Parser(const std::vector<SqlToken>& tokens) : t_(tokens) {}

  QueryAst run() {
    if (t_.empty()) throw SqlError(SqlErrorKind::UnterminatedInput, 0, "no tokens");
    const SqlToken& first = t_.front();
    if (first.kind == TokenKind::Keyword && is_dml_or_ddl(first.text)) {
      throw SqlError(SqlErrorKind::UnsupportedStatement, first.offset, "only SELECT statements are supported");
    }
    if (!(is_kw("select") || is_kw("from"))) fail("SELECT");
    QueryAst ast = query();
    while (is_punct(";")) ++i_;
    if (i_ < t_.size()) fail("end of statement");
    return ast;
  }

 private:
  // ---- token helpers ----
  const SqlToken* cur() const { return i_ < t_.size() ? &t_[i_] : nullptr; }
  const SqlToken* at(std::size_t k) const { return i_ + k < t_.size() ? &t_[i_ + k] : nullptr; }
  bool is_kw(std::string_view kw, std::size_t k = 0) const {
    auto* t = at(k);
    return t && t->kind == TokenKind::Keyword && t->text == kw;
  }
  bool is_punct(std::string_view p, std::size_t k = 0) const {
    auto* t = at(k);
    return t && t->kind == TokenKind::Punctuation && t->text == p;
  }
  bool is_op(std::string_view p, std::size_t k = 0) const {
    auto* t = at(k);
    return t && t->kind == TokenKind::Operator && t->text == p;
  }
  bool is_ident(std::size_t k = 0) const {
    auto* t = at(k);
    return t && (t->kind == TokenKind::Identifier || t->kind == TokenKind::QualifiedIdentifier);
  }
  bool is_bare_ident(std::string_view name, std::size_t k = 0) const {
    auto* t = at(k);
    return t && t->kind == TokenKind::Identifier && t->text == name;
  }
  std::size_t offset_here() const {
    if (auto* t = cur()) return t->offset;
    if (t_.empty()) return 0;
    return t_.back().offset + t_.back().text.size();
  }
  [[noreturn]] void fail(std::string expected) const {
    std::string found = cur() ? "'" + cur()->text + "'" : std::string("end of input");
    throw SqlError(SqlErrorKind::SyntaxError, offset_here(), "expected " + expected + ", found " + found);
  }
  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) fail(std::string(kw));
    ++i_;
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("'" + std::string(p) + "'");
    ++i_;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    ++i_;
    return true;
  }

  // ---- scopes ----
  struct Context {
    QueryAst* ast;
    Clause clause;
    std::optional<Aggregate> aggregate;
  };

  void enter_clause(Clause c) {
    ctx_.clause = c;
    if (!ctx_.ast->has(c)) ctx_.ast->clauses.push_back(c);
  }

  std::size_t add_column(const SqlToken& tok) {
    ColumnRef ref;
    ref.text = tok.text;
    ref.clause = ctx_.clause;
    ref.aggregate = ctx_.aggregate;
    ref.offset = tok.offset;
    ctx_.ast->columns.push_back(std::move(ref));
    return ctx_.ast->columns.size() - 1;
  }

  // Parses a nested query into a child scope of the current one.
  std::size_t subquery() {
    Context saved = ctx_;
    Subquery sq;
    sq.host = ctx_.clause;
    sq.query = query();
    ctx_ = saved;
    ctx_.ast->subqueries.push_back(std::move(sq));
    return ctx_.ast->subqueries.size() - 1;
  }

  // ---- statements ----
  QueryAst query() {
    QueryAst ast;
    Context saved = ctx_;
    ctx_ = Context{&ast, Clause::Select, std::nullopt};
    select_core();
    while (is_kw("union") || is_kw("intersect") || is_kw("except") || is_kw("minus")) {
      ++i_;
      accept_kw("all") || accept_kw("distinct");
      Subquery branch;
      branch.host = Clause::Select;
      Context inner = ctx_;
      branch.query = query_core_only();
      ctx_ = inner;
      ast.subqueries.push_back(std::move(branch));
    }
    if (is_kw("order")) order_by();
    if (is_kw("limit")) fail("end of query (LIMIT is not supported)");
    ctx_ = saved;
    return ast;
  }

  QueryAst query_core_only() {
    QueryAst ast;
    ctx_ = Context{&ast, Clause::Select, std::nullopt};
    select_core();
    return ast;
  }

  void select_core() {
    if (accept_kw("select")) {
      enter_clause(Clause::Select);
      accept_kw("distinct") || accept_kw("all");
      select_list();
    }
    if (accept_kw("from")) {
      enter_clause(Clause::From);
      table_ref(Clause::From);
      while (true) {
        if (is_punct(",")) {
          ++i_;
          ctx_.clause = Clause::From;
          table_ref(Clause::From);
        } else if (at_join()) {
          join();
        } else {
          break;
        }
      }
    } else if (ctx_.ast->clauses.empty()) {
      fail("SELECT or FROM");
    }
    if (accept_kw("where")) {
      enter_clause(Clause::Where);
      expr();
    }
    if (is_kw("group")) {
      ++i_;
      expect_kw("by");
      enter_clause(Clause::GroupBy);
      expr();
      while (is_punct(",")) {
        ++i_;
        expr();
      }
    }
    if (accept_kw("having")) {
      enter_clause(Clause::Having);
      expr();
    }
  }

  void order_by() {
    expect_kw("order");
    expect_kw("by");
    enter_clause(Clause::OrderBy);
    while (true) {
      expr();
      accept_kw("asc") || accept_kw("desc");
      if (is_bare_ident("nulls")) {
        ++i_;
        if (!(is_bare_ident("first") || is_bare_ident("last"))) fail("FIRST or LAST");
        ++i_;
      }
      if (!is_punct(",")) break;
      ++i_;
    }
  }

  void select_list() {
    while (true) {
      if (is_op("*")) {
        ++i_;
      } else {
        ExprInfo e = expr();
        SelectItem item;
        item.column = e.column;
        if (accept_kw("as")) {
          if (!is_ident()) fail("alias");
          item.output_name = cur()->text;
          ++i_;
        } else if (at(0) && at(0)->kind == TokenKind::Identifier && !is_bare_ident("nulls")) {
          item.output_name = cur()->text;
          ++i_;
        } else if (e.column) {
          const std::string& text = ctx_.ast->columns[*e.column].text;
          auto dot = text.rfind('.');
          item.output_name = dot == std::string::npos ? text : text.substr(dot + 1);
        }
        ctx_.ast->select_items.push_back(std::move(item));
      }
      if (!is_punct(",")) break;
      ++i_;
    }
  }

  bool at_join() const {
    if (is_kw("join")) return true;
    if (is_kw("inner") || is_kw("cross")) return is_kw("join", 1);
    if (is_kw("left") || is_kw("right") || is_kw("full")) {
      return is_kw("join", 1) || (is_kw("outer", 1) && is_kw("join", 2));
    }
    return false;
  }

  void join() {
    while (!is_kw("join")) ++i_;  // join type words, validated by at_join
    ++i_;
    accept_kw("fetch");
    enter_clause(Clause::Join);
    table_ref(Clause::Join);
    if (accept_kw("on")) {
      ctx_.clause = Clause::Join;
      expr();
    }
  }

  void table_ref(Clause clause) {
    TableRef ref;
    ref.clause = clause;
    ref.offset = offset_here();
    if (is_punct("(")) {
      ++i_;
      if (!(is_kw("select") || is_kw("from"))) fail("subquery");
      ref.derived = subquery();
      expect_punct(")");
    } else if (is_ident()) {
      ref.name = cur()->text;
      ++i_;
    } else {
      fail("table name");
    }
    if (accept_kw("as")) {
      if (!is_ident()) fail("alias");
      ref.alias = cur()->text;
      ++i_;
    } else if (at(0) && at(0)->kind == TokenKind::Identifier) {
      ref.alias = cur()->text;
      ++i_;
    }
    if (!ref.alias.empty() && !ref.derived) ctx_.ast->alias_table[ref.alias] = ref.name;
    ctx_.ast->tables.push_back(std::move(ref));
  }

  // ---- expressions ----
  ExprInfo expr() {
    ExprInfo left = and_expr();
    while (accept_kw("or")) {
      and_expr();
      left = {};
    }
    return left;
  }

  ExprInfo and_expr() {
    ExprInfo left = not_expr();
    while (accept_kw("and")) {
      not_expr();
      left = {};
    }
    return left;
  }

  ExprInfo not_expr() {
    if (accept_kw("not")) {
      not_expr();
      return {};
    }
    return predicate();
  }

  ExprInfo predicate() {
    if (accept_kw("exists")) {
      expect_punct("(");
      subquery();
      expect_punct(")");
      return {};
    }
    ExprInfo left = additive();
    bool any_tail = false;
    while (true) {
      if (auto* t = cur(); t && t->kind == TokenKind::Operator &&
                           (t->text == "=" || t->text == "<>" || t->text == "!=" || t->text == "<" ||
                            t->text == ">" || t->text == "<=" || t->text == ">=" || t->text == "==")) {
        ++i_;
        if ((is_kw("all") || is_bare_ident("any") || is_bare_ident("some")) && is_punct("(", 1)) {
          i_ += 2;
          subquery();
          expect_punct(")");
        } else {
          additive();
        }
        any_tail = true;
        continue;
      }
      std::size_t save = i_;
      bool negated = accept_kw("not");
      if (accept_kw("in")) {
        in_tail();
      } else if (accept_kw("between")) {
        additive();
        expect_kw("and");
        additive();
      } else if (accept_kw("like") || accept_kw("ilike")) {
        additive();
        if (accept_kw("escape")) additive();
      } else if (!negated && accept_kw("is")) {
        accept_kw("not");
        expect_kw("null");
      } else {
        i_ = save;
        break;
      }
      any_tail = true;
    }
    return any_tail ? ExprInfo{} : left;
  }

  void in_tail() {
    if (at(0) && at(0)->kind == TokenKind::Placeholder) {
      ++i_;
      return;
    }
    if (is_ident() && is_punct("(", 1)) {  // HQL: in elements(x.y)
      additive();
      return;
    }
    expect_punct("(");
    if (is_kw("select") || is_kw("from")) {
      subquery();
    } else {
      expr();
      while (is_punct(",")) {
        ++i_;
        expr();
      }
    }
    expect_punct(")");
  }

  ExprInfo additive() {
    ExprInfo left = multiplicative();
    while (is_op("+") || is_op("-") || is_op("||")) {
      ++i_;
      multiplicative();
      left = {};
    }
    return left;
  }

  ExprInfo multiplicative() {
    ExprInfo left = unary();
    while (is_op("*") || is_op("/") || is_op("%")) {
      ++i_;
      unary();
      left = {};
    }
    return left;
  }

  ExprInfo unary() {
    if (is_op("-") || is_op("+")) {
      ++i_;
      unary();
      return {};
    }
    ExprInfo e = primary();
    while (is_op("::")) {
      ++i_;
      if (!is_ident() && !(cur() && cur()->kind == TokenKind::Keyword)) fail("type name");
      ++i_;
      e = {};
    }
    return e;
  }

  void argument_list() {
    expect_punct("(");
    if (is_punct(")")) {
      ++i_;
      return;
    }
    accept_kw("distinct") || accept_kw("all");
    if (is_op("*")) {
      ++i_;
    } else {
      expr();
      while (is_punct(",")) {
        ++i_;
        expr();
      }
    }
    expect_punct(")");
  }

  ExprInfo primary() {
    const SqlToken* t = cur();
    if (!t) fail("expression");
    switch (t->kind) {
      case TokenKind::Literal:
      case TokenKind::Placeholder:
        ++i_;
        return {};
      case TokenKind::Punctuation:
        if (t->text == "(") {
          ++i_;
          if (is_kw("select") || is_kw("from")) {
            subquery();
            expect_punct(")");
            return {};
          }
          ExprInfo inner = expr();
          bool tuple = false;
          while (is_punct(",")) {
            ++i_;
            expr();
            tuple = true;
          }
          expect_punct(")");
          return tuple ? ExprInfo{} : inner;
        }
        fail("expression");
      case TokenKind::Keyword:
        return keyword_primary();
      case TokenKind::Identifier:
      case TokenKind::QualifiedIdentifier:
        return identifier_primary();
      case TokenKind::Operator:
        fail("expression");
    }
    fail("expression");
  }

  ExprInfo keyword_primary() {
    const SqlToken& t = *cur();
    if (t.text == "null") {
      ++i_;
      return {};
    }
    if (t.text == "case") {
      ++i_;
      if (!is_kw("when")) expr();
      while (accept_kw("when")) {
        expr();
        expect_kw("then");
        expr();
      }
      if (accept_kw("else")) expr();
      expect_kw("end");
      return {};
    }
    if (auto agg = aggregate_of(t.text)) {
      if (is_punct("(", 1)) {
        ++i_;
        auto saved = ctx_.aggregate;
        ctx_.aggregate = *agg;
        argument_list();
        ctx_.aggregate = saved;
        return {};
      }
      // An aggregate name not followed by '(' is an ordinary column name.
      std::size_t col = add_column(t);
      ++i_;
      return ExprInfo{col};
    }
    if ((t.text == "left" || t.text == "right") && is_punct("(", 1)) {
      ++i_;
      argument_list();
      return {};
    }
    fail("expression");
  }

  ExprInfo identifier_primary() {
    const SqlToken& t = *cur();
    if (t.kind == TokenKind::Identifier && t.text == "new" && is_ident(1) && is_punct("(", 2)) {
      i_ += 2;
      argument_list();
      return {};
    }
    if (t.kind == TokenKind::Identifier && t.text == "cast" && is_punct("(", 1)) {
      i_ += 2;
      expr();
      expect_kw("as");
      int depth = 0;
      while (cur() && !(depth == 0 && is_punct(")"))) {
        if (is_punct("(")) ++depth;
        if (is_punct(")")) --depth;
        ++i_;
      }
      expect_punct(")");
      return {};
    }
    if (is_punct("(", 1)) {  // non-aggregate function call; its name is not a column
      ++i_;
      argument_list();
      return {};
    }
    if (t.kind == TokenKind::QualifiedIdentifier && t.text.size() >= 2 && t.text.ends_with(".*")) {
      ++i_;
      return {};
    }
    std::size_t col = add_column(t);
    ++i_;
    return ExprInfo{col};
  }

  const std::vector<SqlToken>& t_;
  std::size_t i_ = 0;
  Context ctx_{nullptr, Clause::Select, std::nullopt};
};

// ---------------------------------------------------------------- resolution

bool starts_with_segment(const std::string& text, const std::string& prefix) {
  return text.size() > prefix.size() && text.compare(0, prefix.size(), prefix) == 0 && text[prefix.size()] == '.';
}

std::string first_segment(const std::string& text) { return text.substr(0, text.find('.')); }

class Resolver {
 public:
  void resolve(QueryAst& ast, std::vector<QueryAst*>& chain) {
    chain.push_back(&ast);
    resolve_tables(ast, chain);
    for (auto& sq : ast.subqueries) resolve(sq.query, chain);
    for (auto& col : ast.columns) resolve_column(ast, col, chain);
    chain.pop_back();
  }

 private:
  // Join paths such as `m.prod` are rewritten through the alias of an
  // enclosing or earlier table.
  void resolve_tables(QueryAst& ast, const std::vector<QueryAst*>& chain) {
    for (auto& ref : ast.tables) {
      if (ref.derived || ref.name.find('.') == std::string::npos) continue;
      std::string head = first_segment(ref.name);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        auto found = (*it)->alias_table.find(head);
        if (found != (*it)->alias_table.end() && found->second != ref.name) {
          ref.name = found->second + ref.name.substr(head.size());
          break;
        }
      }
    }
    for (auto& [alias, table] : ast.alias_table) {
      for (const auto& ref : ast.tables) {
        if (!ref.derived && ref.alias == alias) table = ref.name;
      }
    }
  }

  static void set(ColumnRef& col, std::string table, std::string column) {
    col.resolved = true;
    col.table = std::move(table);
    col.column = std::move(column);
  }

  static void set_unresolved(QueryAst& owner, ColumnRef& col) {
    col.resolved = true;
    col.unresolved = true;
    col.table = "?unresolved";
    col.column = col.text;
    ++owner.unresolved_count;
  }

  // Column lineage through a derived table's select list.
  static void through_derived(const QueryAst& derived, const std::string& name, ColumnRef& col) {
    for (const auto& item : derived.select_items) {
      if (item.output_name != name) continue;
      if (item.column) {
        const ColumnRef& src = derived.columns[*item.column];
        if (src.resolved && !src.unresolved && !src.output_alias) {
          set(col, src.table, src.column);
          return;
        }
      }
      break;
    }
    set(col, "?derived", name);
  }

  void resolve_column(QueryAst& owner, ColumnRef& col, const std::vector<QueryAst*>& chain) {
    const std::string& text = col.text;
    const bool qualified = text.find('.') != std::string::npos;

    if (!qualified) {
      if (col.clause == Clause::GroupBy || col.clause == Clause::Having || col.clause == Clause::OrderBy) {
        for (const auto& item : owner.select_items) {
          if (item.output_name == text && !(item.column && owner.columns[*item.column].text == text)) {
            col.output_alias = true;
            col.resolved = true;
            return;
          }
        }
      }
      // A bare alias denotes the whole entity (HQL `select m from Model m`).
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        auto found = (*it)->alias_table.find(text);
        if (found != (*it)->alias_table.end()) {
          set(col, found->second, "");
          return;
        }
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const QueryAst& scope = **it;
        if (scope.tables.empty()) continue;
        if (scope.tables.size() != 1) break;
        const TableRef& only = scope.tables.front();
        if (only.derived) {
          through_derived(scope.subqueries[*only.derived].query, text, col);
        } else {
          set(col, only.name, text);
        }
        return;
      }
      set_unresolved(owner, col);
      return;
    }

    const std::string head = first_segment(text);
    const std::string rest = text.substr(head.size() + 1);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const QueryAst& scope = **it;
      auto found = scope.alias_table.find(head);
      if (found != scope.alias_table.end()) {
        set(col, found->second, rest);
        return;
      }
      for (const auto& ref : scope.tables) {
        if (ref.derived && ref.alias == head) {
          through_derived(scope.subqueries[*ref.derived].query, rest, col);
          return;
        }
      }
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const TableRef* best = nullptr;
      for (const auto& ref : (*it)->tables) {
        if (ref.derived || !starts_with_segment(text, ref.name)) continue;
        if (!best || ref.name.size() > best->name.size()) best = &ref;
      }
      if (best) {
        set(col, best->name, text.substr(best->name.size() + 1));
        return;
      }
    }
    // A property path of the single entity in scope (HQL implicit join).
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const QueryAst& scope = **it;
      if (scope.tables.empty()) continue;
      if (scope.tables.size() == 1 && !scope.tables.front().derived) {
        set(col, scope.tables.front().name, text);
        return;
      }
      break;
    }
    set_unresolved(owner, col);
  }
};

}  // namespace

QueryAst parse(const std::vector<SqlToken>& tokens) { return Parser(tokens).run(); }

QueryAst resolve_aliases(QueryAst ast) {
  std::vector<QueryAst*> chain;
  Resolver().resolve(ast, chain);
  return ast;
}

}  // namespace wld::sql
