#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wld/dataset.hpp"
#include "wld/extent.hpp"

namespace wld {

enum class SelectorOp { Gt, Ge, Lt, Eq, EmptySet };

/// One restriction on one attribute. Numeric and boolean selectors compare
/// `value`; nominal and ordinal selectors compare category `code`.
struct Selector {
  std::size_t attribute = 0;
  SelectorOp op = SelectorOp::Eq;
  double value = 0.0;
  std::int32_t code = -1;

  bool operator==(const Selector&) const = default;
};

enum class PatternErrorKind { Syntax, UnknownAttribute, UnknownCategory, TypeMismatch, DuplicateAttribute };

std::string_view to_string(PatternErrorKind kind);

class PatternError : public std::runtime_error {
 public:
  PatternError(PatternErrorKind kind, const std::string& message);
  PatternErrorKind kind() const noexcept { return kind_; }

 private:
  PatternErrorKind kind_;
};

bool covers(const Selector& s, const Dataset& data, std::size_t obj);
Extent selector_extent(const Selector& s, const Dataset& data);
std::string format_selector(const Selector& s, const Dataset& data);
Selector parse_selector(std::string_view text, const Dataset& data);

/// Conjunction of selectors, at most one per attribute, kept sorted by
/// attribute index.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<Selector> selectors);

  const std::vector<Selector>& selectors() const { return selectors_; }
  std::size_t depth() const { return selectors_.size(); }
  bool empty() const { return selectors_.empty(); }
  bool constrains(std::size_t attribute) const;
  Pattern with(const Selector& s) const;

  /// Canonical string: selectors in attribute order joined by " ∧ ".
  std::string to_string(const Dataset& data) const;

  bool operator==(const Pattern&) const = default;

 private:
  std::vector<Selector> selectors_;
};

bool covers(const Pattern& d, const Dataset& data, std::size_t obj);
Extent extent(const Pattern& d, const Dataset& data);
/// Incremental form: parent extent restricted by one more selector.
Extent extent(const Extent& parent, const Selector& s, const Dataset& data);

/// Accepts the canonical form plus `AND`, `>=` and missing spaces.
Pattern parse_pattern(std::string_view text, const Dataset& data);

inline constexpr std::string_view kAnd = " \xE2\x88\xA7 ";  // " ∧ "

}  // namespace wld
