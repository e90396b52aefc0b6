#include "wld/featurize.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

namespace wld {

namespace {

void collect(const sql::QueryAst& ast, ClauseTokenMap& out) {
  for (const auto& table : ast.tables) {
    if (table.derived) continue;
    out[std::string(sql::to_string(table.clause)) + "_" + table.name] += 1;
  }
  for (const auto& col : ast.columns) {
    if (col.output_alias) continue;
    const std::string name = col.resolved ? col.qualified() : col.text;
    out[std::string(sql::to_string(col.clause)) + "_" + name] += 1;
    if (col.aggregate) out[std::string(sql::to_string(*col.aggregate)) + "_" + name] += 1;
  }
  for (const auto& sq : ast.subqueries) collect(sq.query, out);
}

}  // namespace

ClauseTokenMap featurize(const sql::QueryAst& resolved) {
  ClauseTokenMap out;
  collect(resolved, out);
  return out;
}

ClauseTokenMap featurize_query(std::string_view text) {
  return featurize(sql::resolve_aliases(sql::parse(sql::tokenize(text))));
}

std::vector<std::string> WorkloadMatrix::dictionary() const {
  std::set<std::string> names;
  for (const auto& row : rows) {
    for (const auto& [name, count] : row) names.insert(name);
  }
  return {names.begin(), names.end()};
}

WorkloadMatrix parse_workload(const std::vector<QueryRecord>& records, std::size_t threads) {
  struct Slot {
    bool ok = false;
    ClauseTokenMap row;
    Rejection rejection;
    std::size_t unresolved = 0;
  };
  std::vector<Slot> slots(records.size());
  auto work = [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      auto ast = sql::resolve_aliases(sql::parse(sql::tokenize(records[i].text)));
      slot.unresolved = ast.total_unresolved();
      slot.row = featurize(ast);
      slot.ok = true;
    } catch (const sql::SqlError& e) {
      slot.rejection = Rejection{i, e.kind(), e.offset(), e.what()};
    }
  };

  threads = std::max<std::size_t>(1, std::min(threads, records.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  WorkloadMatrix out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].ok) {
      out.accepted.push_back(i);
      out.rows.push_back(std::move(slots[i].row));
      out.unresolved_references += slots[i].unresolved;
    } else {
      out.rejected.push_back(std::move(slots[i].rejection));
    }
  }
  return out;
}

}  // namespace wld
