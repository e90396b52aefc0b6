#include "wld/dataset_build.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "wld/text.hpp"

namespace wld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Pending {
  Attribute attribute;
  ColumnData data;
};

[[noreturn]] void conflict(const std::string& column, const std::string& why) {
  throw DatasetError(DatasetErrorKind::TypeConflict, column, why);
}

// Raw cells -> typed column. A missing cell (nullopt) or an empty one is unknown.
Pending typed_column(const ColumnHeader& h, Provenance source, const std::vector<std::optional<std::string>>& raw) {
  Pending p;
  p.attribute.name = h.name;
  p.attribute.kind = *h.kind;
  p.attribute.source = source;
  switch (*h.kind) {
    case AttributeKind::Numeric: {
      DenseColumn col;
      col.values.reserve(raw.size());
      for (const auto& cell : raw) {
        if (!cell || trim(*cell).empty()) {
          col.values.push_back(kNaN);
          continue;
        }
        auto v = parse_number(*cell);
        if (!v || std::isnan(*v)) conflict(h.name, "not a number: '" + *cell + "'");
        col.values.push_back(*v);
      }
      p.data = std::move(col);
      break;
    }
    case AttributeKind::Boolean: {
      CodeColumn col;
      for (const auto& cell : raw) {
        std::string v = cell ? to_lower(trim(*cell)) : std::string();
        if (v.empty()) {
          col.codes.push_back(-1);
        } else if (v == "1" || v == "true") {
          col.codes.push_back(1);
        } else if (v == "0" || v == "false") {
          col.codes.push_back(0);
        } else {
          conflict(h.name, "not a boolean: '" + *cell + "'");
        }
      }
      p.data = std::move(col);
      break;
    }
    case AttributeKind::Ordinal: {
      if (h.declared.empty()) conflict(h.name, "ordinal columns need declared levels, e.g. name:ordinal{low|high}");
      p.attribute.categories = h.declared;
      CodeColumn col;
      for (const auto& cell : raw) {
        std::string v = cell ? std::string(trim(*cell)) : std::string();
        if (v.empty()) {
          col.codes.push_back(-1);
          continue;
        }
        auto it = std::find(h.declared.begin(), h.declared.end(), v);
        if (it == h.declared.end()) conflict(h.name, "undeclared level '" + v + "'");
        col.codes.push_back(static_cast<std::int32_t>(it - h.declared.begin()));
      }
      p.data = std::move(col);
      break;
    }
    case AttributeKind::Nominal: {
      std::vector<std::string> domain = h.declared;
      CodeColumn col;
      for (const auto& cell : raw) {
        std::string v = cell ? std::string(trim(*cell)) : std::string();
        if (v.empty()) v = "unknown";
        auto it = std::find(domain.begin(), domain.end(), v);
        if (it == domain.end()) {
          domain.push_back(v);
          it = domain.end() - 1;
        }
        col.codes.push_back(static_cast<std::int32_t>(it - domain.begin()));
      }
      p.attribute.categories = std::move(domain);
      p.data = std::move(col);
      break;
    }
  }
  return p;
}

// Civil date to days since 1970-01-01 (proleptic Gregorian).
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

struct Interval {
  std::size_t row;
  double start;
  double end;
};

std::string required_column(const csv::Table& t, const std::string& name, const std::string& table) {
  if (t.column(name) < 0) throw DatasetError(DatasetErrorKind::MissingColumn, name, table + " table lacks this column");
  return name;
}

double required_time(const std::string& raw, const std::string& column) {
  auto v = parse_timestamp(raw);
  if (!v) conflict(column, "not a timestamp: '" + raw + "'");
  return *v;
}

}  // namespace

ColumnHeader parse_column_header(std::string_view cell) {
  ColumnHeader h;
  cell = trim(cell);
  std::string_view declared;
  if (!cell.empty() && cell.back() == '}') {
    auto open = cell.rfind('{');
    if (open != std::string_view::npos) {
      declared = cell.substr(open + 1, cell.size() - open - 2);
      cell = cell.substr(0, open);
    }
  }
  auto colon = cell.rfind(':');
  if (colon != std::string_view::npos) {
    if (auto kind = parse_attribute_kind(cell.substr(colon + 1))) {
      h.kind = kind;
      cell = cell.substr(0, colon);
    }
  }
  h.name = std::string(trim(cell));
  if (!declared.empty()) {
    for (auto& c : split(declared, '|')) h.declared.emplace_back(trim(c));
  }
  return h;
}

std::optional<double> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (auto v = parse_number(text); v && std::isfinite(*v)) return v;
  // YYYY-MM-DD[T| ]HH:MM[:SS[.fff]][Z]
  auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    if (pos + len > text.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
  if (!y || !mo || !d || text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (*mo < 1 || *mo > 12 || *d < 1 || *d > 31) return std::nullopt;
  double seconds = static_cast<double>(days_from_civil(*y, static_cast<unsigned>(*mo), static_cast<unsigned>(*d))) * 86400.0;
  if (text.size() == 10) return seconds;
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  auto hh = digits(11, 2), mm = digits(14, 2);
  if (!hh || !mm || text.size() < 16 || text[13] != ':') return std::nullopt;
  seconds += *hh * 3600.0 + *mm * 60.0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    auto ss = digits(pos + 1, 2);
    if (!ss) return std::nullopt;
    seconds += *ss;
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      std::size_t end = pos + 1;
      while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
      auto frac = parse_number(std::string("0") + std::string(text.substr(pos, end - pos)));
      if (!frac) return std::nullopt;
      seconds += *frac;
      pos = end;
    }
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;
  return seconds;
}

Dataset build_dataset(const BuildInputs& in, const BuildOptions& opt, BuildReport* report) {
  if (!in.queries) throw DatasetError(DatasetErrorKind::MissingColumn, "query", "no query records");
  const auto& records = in.queries->records;
  const std::size_t n = records.size();
  if (in.features && in.features->size() > n) {
    throw DatasetError(DatasetErrorKind::TypeConflict, "features", "more feature rows than query records");
  }

  std::vector<Pending> columns;
  std::set<std::string> taken;
  auto add = [&](Pending p) {
    if (!taken.insert(p.attribute.name).second) conflict(p.attribute.name, "attribute defined twice");
    columns.push_back(std::move(p));
  };

  // Query tokens.
  {
    std::vector<std::string> order = in.dictionary;
    std::set<std::string> known(order.begin(), order.end());
    std::set<std::string> seen;
    if (in.features) {
      for (const auto& row : *in.features) {
        for (const auto& [name, count] : row) seen.insert(name);
      }
    }
    for (const auto& name : seen) {
      if (!known.count(name)) order.push_back(name);  // sorted, after the dictionary
    }
    std::map<std::string, std::size_t> slot;
    std::vector<SparseColumn> sparse(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) slot[order[k]] = k;
    if (in.features) {
      for (std::size_t r = 0; r < in.features->size(); ++r) {
        for (const auto& [name, count] : (*in.features)[r]) {
          if (count <= 0) continue;
          auto& col = sparse[slot.at(name)];
          col.rows.push_back(static_cast<std::uint32_t>(r));
          col.values.push_back(count);
        }
      }
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      Pending p;
      p.attribute = Attribute{order[k], AttributeKind::Numeric, {}, Provenance::QueryToken};
      p.data = std::move(sparse[k]);
      add(std::move(p));
    }
  }

  // Environment join.
  std::vector<std::optional<std::size_t>> env_row(n);
  std::size_t missing = 0;
  if (in.env) {
    const csv::Table& env = *in.env;
    if (opt.join_key.empty()) throw DatasetError(DatasetErrorKind::MissingColumn, "join_key", "env join needs a key");
    std::vector<int> env_key_cols;
    for (const auto& k : opt.join_key) {
      int c = -1;
      for (std::size_t i = 0; i < env.header.size(); ++i) {
        if (parse_column_header(env.header[i]).name == k) c = static_cast<int>(i);
      }
      if (c < 0) throw DatasetError(DatasetErrorKind::MissingColumn, k, "env table lacks the join key");
      env_key_cols.push_back(c);
    }
    std::map<std::vector<std::string>, std::size_t> index;
    for (std::size_t r = 0; r < env.rows.size(); ++r) {
      std::vector<std::string> key;
      for (int c : env_key_cols) key.emplace_back(trim(env.rows[r][c]));
      if (!index.emplace(key, r).second) {
        throw DatasetError(DatasetErrorKind::DuplicateKey, opt.join_key.front(), "env key appears twice");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> key;
      bool complete = true;
      for (const auto& k : opt.join_key) {
        auto it = records[i].fields.find(k);
        if (it == records[i].fields.end()) {
          complete = false;
          break;
        }
        key.emplace_back(trim(it->second));
      }
      auto hit = complete ? index.find(key) : index.end();
      if (hit == index.end()) {
        ++missing;
      } else {
        env_row[i] = hit->second;
      }
    }
    for (std::size_t c = 0; c < env.header.size(); ++c) {
      ColumnHeader h = parse_column_header(env.header[c]);
      if (!h.kind || std::find(env_key_cols.begin(), env_key_cols.end(), static_cast<int>(c)) != env_key_cols.end()) {
        continue;
      }
      std::vector<std::optional<std::string>> raw(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (env_row[i]) raw[i] = env.rows[*env_row[i]][c];
      }
      add(typed_column(h, Provenance::Env, raw));
    }
  }
  if (report) report->missing_join_keys = missing;

  // Server and execution interval of every query, for alerts and ASH.
  std::vector<std::optional<std::string>> server(n);
  std::vector<std::optional<std::pair<double, double>>> window(n);
  if (in.alerts || in.ash) {
    int env_server = -1;
    if (in.env) {
      for (std::size_t c = 0; c < in.env->header.size(); ++c) {
        if (parse_column_header(in.env->header[c]).name == opt.server_column) env_server = static_cast<int>(c);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& f = records[i].fields;
      if (auto it = f.find(opt.server_column); it != f.end()) {
        server[i] = std::string(trim(it->second));
      } else if (env_server >= 0 && env_row[i]) {
        server[i] = std::string(trim(in.env->rows[*env_row[i]][env_server]));
      }
      if (auto it = f.find(opt.timestamp_column); it != f.end() && !trim(it->second).empty()) {
        double ts = required_time(it->second, opt.timestamp_column);
        window[i] = std::make_pair(ts, ts + records[i].time);
      }
    }
  }
  auto overlapping = [&](const csv::Table& t, int sc, int st, int en, const std::string& name) {
    std::map<std::string, std::vector<Interval>> by_server;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Interval iv{r, required_time(t.rows[r][st], name + ".start"), required_time(t.rows[r][en], name + ".end")};
      by_server[std::string(trim(t.rows[r][sc]))].push_back(iv);
    }
    std::vector<std::vector<std::size_t>> hits(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!server[i] || !window[i]) continue;
      auto it = by_server.find(*server[i]);
      if (it == by_server.end()) continue;
      for (const auto& iv : it->second) {
        if (iv.start <= window[i]->second && iv.end >= window[i]->first) hits[i].push_back(iv.row);
      }
    }
    return hits;
  };

  // Alerts: highest overlapping level, lowest level when none.
  if (!opt.alert_names.empty()) {
    std::vector<std::vector<std::int32_t>> level(opt.alert_names.size(), std::vector<std::int32_t>(n, 0));
    if (in.alerts && !in.alerts->rows.empty()) {
      const csv::Table& t = *in.alerts;
      int sc = t.column(required_column(t, opt.server_column, "alerts"));
      int st = t.column(required_column(t, "start", "alerts"));
      int en = t.column(required_column(t, "end", "alerts"));
      int an = t.column(required_column(t, "alert", "alerts"));
      int lv = t.column(required_column(t, "level", "alerts"));
      auto hits = overlapping(t, sc, st, en, "alerts");
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r : hits[i]) {
          auto name = std::find(opt.alert_names.begin(), opt.alert_names.end(), std::string(trim(t.rows[r][an])));
          if (name == opt.alert_names.end()) continue;
          std::string raw = to_lower(trim(t.rows[r][lv]));
          auto lvl = std::find_if(opt.alert_levels.begin(), opt.alert_levels.end(),
                                  [&](const std::string& l) { return to_lower(l) == raw; });
          if (lvl == opt.alert_levels.end()) conflict("level", "unknown alert level '" + t.rows[r][lv] + "'");
          auto& cell = level[static_cast<std::size_t>(name - opt.alert_names.begin())][i];
          cell = std::max(cell, static_cast<std::int32_t>(lvl - opt.alert_levels.begin()));
        }
      }
    }
    for (std::size_t a = 0; a < opt.alert_names.size(); ++a) {
      Pending p;
      p.attribute = Attribute{opt.alert_names[a], AttributeKind::Ordinal, opt.alert_levels, Provenance::Alert};
      p.data = CodeColumn{std::move(level[a])};
      add(std::move(p));
    }
  }

  // ASH: mean over overlapping intervals, 0 when none.
  if (in.ash) {
    const csv::Table& t = *in.ash;
    int sc = t.column(required_column(t, opt.server_column, "ash"));
    int st = t.column(required_column(t, "start", "ash"));
    int en = t.column(required_column(t, "end", "ash"));
    auto hits = overlapping(t, sc, st, en, "ash");
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      ColumnHeader h = parse_column_header(t.header[c]);
      if (!h.kind) continue;
      if (*h.kind != AttributeKind::Numeric) conflict(h.name, "ASH categories must be numeric");
      DenseColumn col;
      col.values.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (hits[i].empty()) continue;
        double sum = 0.0;
        for (std::size_t r : hits[i]) {
          auto v = parse_number(t.rows[r][c]);
          if (!v || std::isnan(*v)) conflict(h.name, "not a number: '" + t.rows[r][c] + "'");
          sum += *v;
        }
        col.values[i] = sum / static_cast<double>(hits[i].size());
      }
      Pending p;
      p.attribute = Attribute{h.name, AttributeKind::Numeric, {}, Provenance::Ash};
      p.data = std::move(col);
      add(std::move(p));
    }
  }

  // Query-log columns: time, nrows, day, hour and any typed extra.
  for (const auto& cell : in.queries->columns) {
    ColumnHeader h = parse_column_header(cell);
    if (h.name == "query" || h.name == "id") continue;
    std::vector<std::optional<std::string>> raw(n);
    if (h.name == "time" || h.name == "nrows") {
      h.kind = AttributeKind::Numeric;
      for (std::size_t i = 0; i < n; ++i) raw[i] = format_number(h.name == "time" ? records[i].time : records[i].nrows);
    } else {
      if (!h.kind) {
        if (h.name == "day") {
          h.kind = AttributeKind::Nominal;
        } else if (h.name == "hour") {
          h.kind = AttributeKind::Numeric;
        } else {
          continue;  // opaque key
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        auto it = records[i].fields.find(cell);
        if (it != records[i].fields.end()) raw[i] = it->second;
      }
    }
    add(typed_column(h, Provenance::Meta, raw));
  }

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = records[i].fields.find("id");
    ids[i] = it != records[i].fields.end() && !trim(it->second).empty() ? std::string(trim(it->second))
                                                                         : "o" + std::to_string(i + 1);
  }
  std::vector<Attribute> attrs;
  std::vector<ColumnData> data;
  for (auto& p : columns) {
    attrs.push_back(std::move(p.attribute));
    data.push_back(std::move(p.data));
  }
  return Dataset(std::move(ids), std::move(attrs), std::move(data));
}

}  // namespace wld
