#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wld {

enum class AttributeKind { Numeric, Nominal, Ordinal, Boolean };
enum class Provenance { QueryToken, Env, Alert, Ash, Meta };

std::string_view to_string(AttributeKind kind);
std::string_view to_string(Provenance source);
std::optional<AttributeKind> parse_attribute_kind(std::string_view s);
std::optional<Provenance> parse_provenance(std::string_view s);

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  std::vector<std::string> categories;  // nominal: domain; ordinal: ascending levels
  Provenance source = Provenance::Meta;
};

/// Sparse numeric column, absent entries are 0. Rows ascending.
struct SparseColumn {
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
};
struct DenseColumn {
  std::vector<double> values;  // NaN marks an unknown value
};
/// Category codes for nominal/ordinal, 0/1 for boolean; -1 marks unknown.
struct CodeColumn {
  std::vector<std::int32_t> codes;
};
using ColumnData = std::variant<SparseColumn, DenseColumn, CodeColumn>;

using Value = std::variant<double, std::string>;

enum class DatasetErrorKind {
  UnknownAttribute,
  UnknownObject,
  TypeConflict,
  MissingColumn,
  DuplicateKey,
  EmptySubset,
  InvalidPredicate,
  InvalidTarget,
};

std::string_view to_string(DatasetErrorKind kind);

class DatasetError : public std::runtime_error {
 public:
  DatasetError(DatasetErrorKind kind, std::string subject, const std::string& message);
  DatasetErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  DatasetErrorKind kind_;
  std::string subject_;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate {
  std::string attribute;
  CompareOp op = CompareOp::Eq;
  std::string value;
};

/// Parses `serverName = LYN`, `time>100`, `nrows <= 3`.
Predicate parse_predicate(std::string_view text);

/// The pair (objects, attributes). Storage is immutable and shared; a filtered
/// view only holds the surviving row list.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> object_ids, std::vector<Attribute> attributes, std::vector<ColumnData> columns);

  std::size_t size() const { return rows_.size(); }
  std::size_t attribute_count() const;
  const Attribute& attribute(std::size_t j) const;
  const std::vector<Attribute>& attributes() const;
  std::size_t attribute_index(std::string_view name) const;  // throws UnknownAttribute
  std::optional<std::size_t> find_attribute(std::string_view name) const;

  const std::string& object_id(std::size_t i) const;
  std::size_t object_index(std::string_view id) const;  // throws UnknownObject
  std::optional<std::size_t> find_object(std::string_view id) const;

  /// Number for numeric/boolean attributes (NaN if unknown); category text
  /// for nominal/ordinal ("unknown" for a missing code).
  Value value(std::size_t attr, std::size_t obj) const;
  Value value(std::string_view attr, std::string_view object_id) const;
  double number(std::size_t attr, std::size_t obj) const;
  std::int32_t code(std::size_t attr, std::size_t obj) const;

  /// Whole column over the view, in view order.
  std::vector<double> numbers(std::size_t attr) const;
  std::vector<std::int32_t> codes(std::size_t attr) const;

  /// Stored nonzeros of sparse columns, restricted to the view.
  std::size_t sparse_nonzeros(std::size_t attr) const;
  bool is_sparse(std::size_t attr) const;

  Dataset filter(const std::vector<Predicate>& predicates,
                 const std::optional<std::vector<std::string>>& object_ids = std::nullopt) const;
  Dataset select_rows(const std::vector<std::size_t>& view_rows) const;
  bool is_view() const;
  std::size_t storage_row(std::size_t obj) const { return rows_[obj]; }
  std::size_t storage_size() const;

  const ColumnData& column_data(std::size_t attr) const;

 private:
  struct Store {
    std::vector<std::string> ids;
    std::vector<Attribute> attributes;
    std::vector<ColumnData> columns;
    std::map<std::string, std::size_t, std::less<>> attribute_by_name;
    std::map<std::string, std::size_t, std::less<>> object_by_id;
  };

  double stored_number(std::size_t attr, std::size_t storage_row) const;
  std::int32_t stored_code(std::size_t attr, std::size_t storage_row) const;
  bool matches(std::size_t attr, std::size_t storage_row, const Predicate& p) const;

  std::shared_ptr<const Store> store_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::int32_t> local_;  // storage row -> view position or -1
};

enum class TargetMode { NumericAttribute, BooleanAttribute, Thresholded, SelectionLabeled };

std::string_view to_string(TargetMode mode);
std::optional<TargetMode> parse_target_mode(std::string_view s);

struct TargetSpec {
  TargetMode mode = TargetMode::NumericAttribute;
  std::string attribute;
  std::optional<double> threshold;
  std::vector<std::string> positive_ids;
};

struct Target {
  std::vector<double> values;  // view order
  bool binary = false;
  bool degenerate = false;  // constant over the objects
  std::optional<std::size_t> attribute;
  std::string description;
  std::vector<std::string> warnings;
};

Target derive_target(const Dataset& data, const TargetSpec& spec);

struct DatasetSummary {
  std::size_t n = 0;
  std::size_t m = 0;
  std::map<std::string, std::size_t> clause_counts;  // FROM, JOIN, SELECT, WHERE, HAVING, GROUPBY, ORDERBY
  std::size_t token_columns = 0;
  std::size_t nonzeros = 0;
  double sparsity = 0.0;
  std::map<std::string, std::size_t> kinds;        // by attribute kind
  std::map<std::string, std::size_t> provenances;  // by source
};

DatasetSummary summarize(const Dataset& data);

}  // namespace wld
