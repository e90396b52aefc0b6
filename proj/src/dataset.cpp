#include "wld/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "wld/text.hpp"

namespace wld {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::string kUnknown = "unknown";

}  // namespace

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Numeric: return "numeric";
    case AttributeKind::Nominal: return "nominal";
    case AttributeKind::Ordinal: return "ordinal";
    case AttributeKind::Boolean: return "boolean";
  }
  return "?";
}

std::string_view to_string(Provenance source) {
  switch (source) {
    case Provenance::QueryToken: return "query-token";
    case Provenance::Env: return "env";
    case Provenance::Alert: return "alert";
    case Provenance::Ash: return "ash";
    case Provenance::Meta: return "meta";
  }
  return "?";
}

std::optional<AttributeKind> parse_attribute_kind(std::string_view s) {
  std::string k = to_lower(trim(s));
  if (k == "numeric") return AttributeKind::Numeric;
  if (k == "nominal") return AttributeKind::Nominal;
  if (k == "ordinal") return AttributeKind::Ordinal;
  if (k == "boolean") return AttributeKind::Boolean;
  return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  std::string k = to_lower(trim(s));
  if (k == "query-token") return Provenance::QueryToken;
  if (k == "env") return Provenance::Env;
  if (k == "alert") return Provenance::Alert;
  if (k == "ash") return Provenance::Ash;
  if (k == "meta") return Provenance::Meta;
  return std::nullopt;
}

std::string_view to_string(DatasetErrorKind kind) {
  switch (kind) {
    case DatasetErrorKind::UnknownAttribute: return "UnknownAttribute";
    case DatasetErrorKind::UnknownObject: return "UnknownObject";
    case DatasetErrorKind::TypeConflict: return "TypeConflict";
    case DatasetErrorKind::MissingColumn: return "MissingColumn";
    case DatasetErrorKind::DuplicateKey: return "DuplicateKey";
    case DatasetErrorKind::EmptySubset: return "EmptySubset";
    case DatasetErrorKind::InvalidPredicate: return "InvalidPredicate";
    case DatasetErrorKind::InvalidTarget: return "InvalidTarget";
  }
  return "?";
}

DatasetError::DatasetError(DatasetErrorKind kind, std::string subject, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " (" + subject + "): " + message),
      kind_(kind),
      subject_(std::move(subject)) {}

Predicate parse_predicate(std::string_view text) {
  static const std::pair<std::string_view, CompareOp> ops[] = {
      {"!=", CompareOp::Ne}, {"<>", CompareOp::Ne}, {"<=", CompareOp::Le}, {">=", CompareOp::Ge},
      {"\xE2\x89\xA5", CompareOp::Ge}, {"\xE2\x89\xA4", CompareOp::Le}, {"=", CompareOp::Eq},
      {"<", CompareOp::Lt}, {">", CompareOp::Gt}};
  std::size_t best = std::string_view::npos;
  std::pair<std::string_view, CompareOp> chosen{};
  for (const auto& op : ops) {
    std::size_t pos = text.find(op.first);
    if (pos != std::string_view::npos && (pos < best || (pos == best && op.first.size() > chosen.first.size()))) {
      best = pos;
      chosen = op;
    }
  }
  if (best == std::string_view::npos) {
    throw DatasetError(DatasetErrorKind::InvalidPredicate, std::string(text), "no comparison operator");
  }
  Predicate p;
  p.attribute = std::string(trim(text.substr(0, best)));
  p.op = chosen.second;
  p.value = std::string(trim(text.substr(best + chosen.first.size())));
  if (p.attribute.empty() || p.value.empty()) {
    throw DatasetError(DatasetErrorKind::InvalidPredicate, std::string(text), "expected `attribute op value`");
  }
  return p;
}

// ------------------------------------------------------------------ Dataset

Dataset::Dataset(std::vector<std::string> object_ids, std::vector<Attribute> attributes,
                 std::vector<ColumnData> columns) {
  auto store = std::make_shared<Store>();
  const std::size_t n = object_ids.size();
  if (attributes.size() != columns.size()) {
    throw DatasetError(DatasetErrorKind::TypeConflict, "<columns>", "attribute and column counts differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!store->object_by_id.emplace(object_ids[i], i).second) {
      throw DatasetError(DatasetErrorKind::DuplicateKey, object_ids[i], "duplicate object id");
    }
  }
  for (std::size_t j = 0; j < attributes.size(); ++j) {
    const Attribute& a = attributes[j];
    if (!store->attribute_by_name.emplace(a.name, j).second) {
      throw DatasetError(DatasetErrorKind::DuplicateKey, a.name, "duplicate attribute name");
    }
    const ColumnData& col = columns[j];
    bool ok = true;
    if (a.kind == AttributeKind::Numeric) {
      if (auto* s = std::get_if<SparseColumn>(&col)) {
        ok = s->rows.size() == s->values.size() && std::is_sorted(s->rows.begin(), s->rows.end()) &&
             std::adjacent_find(s->rows.begin(), s->rows.end()) == s->rows.end() &&
             (s->rows.empty() || s->rows.back() < n);
      } else if (auto* d = std::get_if<DenseColumn>(&col)) {
        ok = d->values.size() == n;
      } else {
        ok = false;
      }
    } else {
      auto* c = std::get_if<CodeColumn>(&col);
      ok = c && c->codes.size() == n;
      if (ok) {
        const std::int32_t limit =
            a.kind == AttributeKind::Boolean ? 2 : static_cast<std::int32_t>(a.categories.size());
        ok = std::all_of(c->codes.begin(), c->codes.end(), [&](std::int32_t v) { return v >= -1 && v < limit; });
      }
    }
    if (!ok) throw DatasetError(DatasetErrorKind::TypeConflict, a.name, "column storage does not fit its kind");
  }
  store->ids = std::move(object_ids);
  store->attributes = std::move(attributes);
  store->columns = std::move(columns);
  store_ = std::move(store);
  rows_.resize(n);
  local_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows_[i] = static_cast<std::uint32_t>(i);
    local_[i] = static_cast<std::int32_t>(i);
  }
}

std::size_t Dataset::attribute_count() const { return store_ ? store_->attributes.size() : 0; }
const Attribute& Dataset::attribute(std::size_t j) const { return store_->attributes.at(j); }
const std::vector<Attribute>& Dataset::attributes() const {
  static const std::vector<Attribute> none;
  return store_ ? store_->attributes : none;
}
std::size_t Dataset::storage_size() const { return store_ ? store_->ids.size() : 0; }
bool Dataset::is_view() const { return rows_.size() != storage_size(); }
const ColumnData& Dataset::column_data(std::size_t attr) const { return store_->columns.at(attr); }

std::optional<std::size_t> Dataset::find_attribute(std::string_view name) const {
  if (!store_) return std::nullopt;
  auto it = store_->attribute_by_name.find(name);
  if (it == store_->attribute_by_name.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::attribute_index(std::string_view name) const {
  if (auto j = find_attribute(name)) return *j;
  throw DatasetError(DatasetErrorKind::UnknownAttribute, std::string(name), "no such attribute");
}

const std::string& Dataset::object_id(std::size_t i) const { return store_->ids.at(rows_.at(i)); }

std::optional<std::size_t> Dataset::find_object(std::string_view id) const {
  if (!store_) return std::nullopt;
  auto it = store_->object_by_id.find(id);
  if (it == store_->object_by_id.end()) return std::nullopt;
  std::int32_t local = local_[it->second];
  if (local < 0) return std::nullopt;
  return static_cast<std::size_t>(local);
}

std::size_t Dataset::object_index(std::string_view id) const {
  if (auto i = find_object(id)) return *i;
  throw DatasetError(DatasetErrorKind::UnknownObject, std::string(id), "no such object");
}

double Dataset::stored_number(std::size_t attr, std::size_t row) const {
  const ColumnData& col = store_->columns[attr];
  if (auto* s = std::get_if<SparseColumn>(&col)) {
    auto it = std::lower_bound(s->rows.begin(), s->rows.end(), static_cast<std::uint32_t>(row));
    if (it != s->rows.end() && *it == row) return s->values[static_cast<std::size_t>(it - s->rows.begin())];
    return 0.0;
  }
  if (auto* d = std::get_if<DenseColumn>(&col)) return d->values[row];
  std::int32_t c = std::get<CodeColumn>(col).codes[row];
  return c < 0 ? kNaN : static_cast<double>(c);
}

std::int32_t Dataset::stored_code(std::size_t attr, std::size_t row) const {
  const ColumnData& col = store_->columns[attr];
  if (auto* c = std::get_if<CodeColumn>(&col)) return c->codes[row];
  return -1;
}

double Dataset::number(std::size_t attr, std::size_t obj) const { return stored_number(attr, rows_.at(obj)); }
std::int32_t Dataset::code(std::size_t attr, std::size_t obj) const { return stored_code(attr, rows_.at(obj)); }

Value Dataset::value(std::size_t attr, std::size_t obj) const {
  const Attribute& a = attribute(attr);
  if (a.kind == AttributeKind::Numeric || a.kind == AttributeKind::Boolean) return number(attr, obj);
  std::int32_t c = code(attr, obj);
  return c < 0 ? kUnknown : a.categories[static_cast<std::size_t>(c)];
}

Value Dataset::value(std::string_view attr, std::string_view object_id) const {
  return value(attribute_index(attr), object_index(object_id));
}

std::vector<double> Dataset::numbers(std::size_t attr) const {
  const ColumnData& col = store_->columns.at(attr);
  std::vector<double> out(rows_.size(), 0.0);
  if (auto* s = std::get_if<SparseColumn>(&col)) {
    for (std::size_t k = 0; k < s->rows.size(); ++k) {
      std::int32_t local = local_[s->rows[k]];
      if (local >= 0) out[static_cast<std::size_t>(local)] = s->values[k];
    }
    return out;
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = stored_number(attr, rows_[i]);
  return out;
}

std::vector<std::int32_t> Dataset::codes(std::size_t attr) const {
  std::vector<std::int32_t> out(rows_.size(), -1);
  for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = stored_code(attr, rows_[i]);
  return out;
}

bool Dataset::is_sparse(std::size_t attr) const {
  return std::holds_alternative<SparseColumn>(store_->columns.at(attr));
}

std::size_t Dataset::sparse_nonzeros(std::size_t attr) const {
  const ColumnData& col = store_->columns.at(attr);
  std::size_t nz = 0;
  if (auto* s = std::get_if<SparseColumn>(&col)) {
    for (std::size_t k = 0; k < s->rows.size(); ++k) {
      if (local_[s->rows[k]] >= 0 && s->values[k] != 0.0) ++nz;
    }
  } else if (auto* d = std::get_if<DenseColumn>(&col)) {
    for (auto r : rows_) {
      if (d->values[r] != 0.0 && !std::isnan(d->values[r])) ++nz;
    }
  }
  return nz;
}

bool Dataset::matches(std::size_t attr, std::size_t row, const Predicate& p) const {
  const Attribute& a = store_->attributes[attr];
  auto compare = [&](auto lhs, auto rhs) {
    switch (p.op) {
      case CompareOp::Eq: return lhs == rhs;
      case CompareOp::Ne: return lhs != rhs;
      case CompareOp::Lt: return lhs < rhs;
      case CompareOp::Le: return lhs <= rhs;
      case CompareOp::Gt: return lhs > rhs;
      case CompareOp::Ge: return lhs >= rhs;
    }
    return false;
  };
  if (a.kind == AttributeKind::Numeric || a.kind == AttributeKind::Boolean) {
    double v = stored_number(attr, row);
    if (std::isnan(v)) return false;
    return compare(v, *parse_number(p.value));
  }
  std::int32_t c = stored_code(attr, row);
  if (c < 0) return false;
  auto it = std::find(a.categories.begin(), a.categories.end(), p.value);
  if (it == a.categories.end()) return p.op == CompareOp::Ne;
  return compare(c, static_cast<std::int32_t>(it - a.categories.begin()));
}

Dataset Dataset::filter(const std::vector<Predicate>& predicates,
                        const std::optional<std::vector<std::string>>& object_ids) const {
  std::vector<std::size_t> attrs;
  for (const auto& p : predicates) {
    std::size_t j = attribute_index(p.attribute);
    const Attribute& a = attribute(j);
    const bool ordered = p.op != CompareOp::Eq && p.op != CompareOp::Ne;
    if (a.kind == AttributeKind::Numeric || a.kind == AttributeKind::Boolean) {
      auto v = parse_number(p.value);
      if (!v || std::isnan(*v)) throw DatasetError(DatasetErrorKind::InvalidPredicate, p.attribute, "needs a number");
    } else if (ordered) {
      if (a.kind == AttributeKind::Nominal) {
        throw DatasetError(DatasetErrorKind::InvalidPredicate, p.attribute, "nominal attributes support = and != only");
      }
      if (std::find(a.categories.begin(), a.categories.end(), p.value) == a.categories.end()) {
        throw DatasetError(DatasetErrorKind::InvalidPredicate, p.attribute, "unknown level " + p.value);
      }
    }
    attrs.push_back(j);
  }
  std::vector<std::uint8_t> keep_row;
  if (object_ids) {
    keep_row.assign(storage_size(), 0);
    for (const auto& id : *object_ids) keep_row[rows_[object_index(id)]] = 1;
  }
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    std::size_t row = rows_[i];
    if (object_ids && !keep_row[row]) continue;
    bool ok = true;
    for (std::size_t k = 0; k < predicates.size() && ok; ++k) ok = matches(attrs[k], row, predicates[k]);
    if (ok) survivors.push_back(i);
  }
  if (survivors.empty()) throw DatasetError(DatasetErrorKind::EmptySubset, "<subset>", "no object satisfies the filter");
  return select_rows(survivors);
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& view_rows) const {
  Dataset out;
  out.store_ = store_;
  out.local_.assign(storage_size(), -1);
  for (std::size_t i : view_rows) {
    std::uint32_t row = rows_.at(i);
    if (out.local_[row] >= 0) continue;
    out.local_[row] = static_cast<std::int32_t>(out.rows_.size());
    out.rows_.push_back(row);
  }
  return out;
}

// ------------------------------------------------------------------ targets

std::string_view to_string(TargetMode mode) {
  switch (mode) {
    case TargetMode::NumericAttribute: return "numeric";
    case TargetMode::BooleanAttribute: return "boolean";
    case TargetMode::Thresholded: return "thresholded";
    case TargetMode::SelectionLabeled: return "selection";
  }
  return "?";
}

std::optional<TargetMode> parse_target_mode(std::string_view s) {
  std::string k = to_lower(trim(s));
  if (k == "numeric" || k == "numeric-attribute") return TargetMode::NumericAttribute;
  if (k == "boolean" || k == "boolean-attribute") return TargetMode::BooleanAttribute;
  if (k == "thresholded" || k == "threshold") return TargetMode::Thresholded;
  if (k == "selection" || k == "selection-labeled") return TargetMode::SelectionLabeled;
  return std::nullopt;
}

Target derive_target(const Dataset& data, const TargetSpec& spec) {
  auto invalid = [&](const std::string& why) {
    return DatasetError(DatasetErrorKind::InvalidTarget, spec.attribute.empty() ? "<target>" : spec.attribute, why);
  };
  const bool wants_attribute = spec.mode != TargetMode::SelectionLabeled;
  if (wants_attribute && spec.attribute.empty()) throw invalid("an attribute is required");
  if (!wants_attribute && !spec.attribute.empty()) throw invalid("selection targets take object ids only");
  if ((spec.mode == TargetMode::Thresholded) != spec.threshold.has_value()) {
    throw invalid(spec.mode == TargetMode::Thresholded ? "a threshold is required" : "threshold not allowed here");
  }
  if (spec.mode != TargetMode::SelectionLabeled && !spec.positive_ids.empty()) throw invalid("object ids not allowed here");

  Target t;
  const std::size_t n = data.size();
  switch (spec.mode) {
    case TargetMode::NumericAttribute:
    case TargetMode::BooleanAttribute:
    case TargetMode::Thresholded: {
      std::size_t j = data.attribute_index(spec.attribute);
      const Attribute& a = data.attribute(j);
      if (a.kind != AttributeKind::Numeric && a.kind != AttributeKind::Boolean) {
        throw invalid("attribute must be numeric or boolean");
      }
      t.attribute = j;
      std::vector<double> v = data.numbers(j);
      if (spec.mode == TargetMode::Thresholded) {
        if (std::isnan(*spec.threshold)) throw invalid("threshold must be a number");
        for (double& x : v) x = (x > *spec.threshold) ? 1.0 : 0.0;
        t.binary = true;
        t.description = spec.attribute + " > " + format_number(*spec.threshold);
      } else {
        if (std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) {
          throw invalid("target has unknown values");
        }
        if (spec.mode == TargetMode::BooleanAttribute) {
          if (!std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0 || x == 1.0; })) {
            throw invalid("boolean target needs 0/1 values");
          }
          t.binary = true;
        }
        t.description = spec.attribute;
      }
      t.values = std::move(v);
      break;
    }
    case TargetMode::SelectionLabeled: {
      t.values.assign(n, 0.0);
      for (const auto& id : spec.positive_ids) t.values[data.object_index(id)] = 1.0;
      t.binary = true;
      t.description = "selection of " + std::to_string(spec.positive_ids.size()) + " objects";
      break;
    }
  }
  t.degenerate = n == 0 || std::all_of(t.values.begin(), t.values.end(), [&](double x) { return x == t.values[0]; });
  if (t.degenerate) t.warnings.push_back("DegenerateTarget: target is constant over the objects");
  return t;
}

// ------------------------------------------------------------------ summary

DatasetSummary summarize(const Dataset& data) {
  static const char* tags[] = {"FROM",  "JOIN", "SELECT", "WHERE", "HAVING", "GROUPBY",
                               "ORDERBY", "AVG", "SUM",    "COUNT", "MIN",    "MAX"};
  DatasetSummary s;
  s.n = data.size();
  s.m = data.attribute_count();
  for (const char* tag : tags) s.clause_counts[tag] = 0;
  for (std::size_t j = 0; j < s.m; ++j) {
    const Attribute& a = data.attribute(j);
    s.kinds[std::string(to_string(a.kind))] += 1;
    s.provenances[std::string(to_string(a.source))] += 1;
    if (a.source != Provenance::QueryToken || a.kind != AttributeKind::Numeric) continue;
    ++s.token_columns;
    s.nonzeros += data.sparse_nonzeros(j);
    std::string_view name = a.name;
    auto us = name.find('_');
    if (us == std::string_view::npos) continue;
    auto it = s.clause_counts.find(std::string(name.substr(0, us)));
    if (it != s.clause_counts.end()) ++it->second;
  }
  const double cells = static_cast<double>(s.n) * static_cast<double>(s.token_columns);
  s.sparsity = cells > 0 ? 1.0 - static_cast<double>(s.nonzeros) / cells : 0.0;
  return s;
}

}  // namespace wld
