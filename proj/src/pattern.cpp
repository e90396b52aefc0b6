#include "wld/pattern.hpp"

#include <algorithm>
#include <cmath>

#include "wld/text.hpp"

namespace wld {

namespace {

constexpr std::string_view kGe = "\xE2\x89\xA5";     // ≥
constexpr std::string_view kLe = "\xE2\x89\xA4";     // ≤
constexpr std::string_view kIn = "\xE2\x88\x88";     // ∈
constexpr std::string_view kEmpty = "\xE2\x88\x85";  // ∅
constexpr std::string_view kWedge = "\xE2\x88\xA7";  // ∧

std::string_view op_text(SelectorOp op) {
  switch (op) {
    case SelectorOp::Gt: return ">";
    case SelectorOp::Ge: return kGe;
    case SelectorOp::Lt: return "<";
    case SelectorOp::Eq: return "=";
    case SelectorOp::EmptySet: return kIn;
  }
  return "?";
}

[[noreturn]] void pattern_fail(PatternErrorKind kind, const std::string& msg) { throw PatternError(kind, msg); }

// Splits on ∧ or on a whitespace-delimited AND (any case).
std::vector<std::string> split_conjuncts(std::string_view text) {
  std::string s(text);
  std::vector<std::string> parts;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, kWedge.size(), kWedge) == 0) {
      parts.push_back(s.substr(start, i - start));
      i += kWedge.size();
      start = i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(s[i])) && i + 4 < s.size() && to_lower(s.substr(i + 1, 3)) == "and" &&
        std::isspace(static_cast<unsigned char>(s[i + 4]))) {
      parts.push_back(s.substr(start, i - start));
      i += 5;
      start = i;
      continue;
    }
    ++i;
  }
  parts.push_back(s.substr(start));
  return parts;
}

}  // namespace

std::string_view to_string(PatternErrorKind kind) {
  switch (kind) {
    case PatternErrorKind::Syntax: return "Syntax";
    case PatternErrorKind::UnknownAttribute: return "UnknownAttribute";
    case PatternErrorKind::UnknownCategory: return "UnknownCategory";
    case PatternErrorKind::TypeMismatch: return "TypeMismatch";
    case PatternErrorKind::DuplicateAttribute: return "DuplicateAttribute";
  }
  return "?";
}

PatternError::PatternError(PatternErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

bool covers(const Selector& s, const Dataset& data, std::size_t obj) {
  const Attribute& a = data.attribute(s.attribute);
  if (s.op == SelectorOp::EmptySet) return false;
  if (a.kind == AttributeKind::Nominal || a.kind == AttributeKind::Ordinal) {
    std::int32_t c = data.code(s.attribute, obj);
    if (c < 0) return false;
    return s.op == SelectorOp::Eq ? c == s.code : (s.op == SelectorOp::Ge && c >= s.code);
  }
  double v = data.number(s.attribute, obj);
  if (std::isnan(v)) return false;
  switch (s.op) {
    case SelectorOp::Gt: return v > s.value;
    case SelectorOp::Ge: return v >= s.value;
    case SelectorOp::Lt: return v < s.value;
    case SelectorOp::Eq: return v == s.value;
    case SelectorOp::EmptySet: return false;
  }
  return false;
}

Extent selector_extent(const Selector& s, const Dataset& data) {
  Extent e(data.size());
  if (s.op == SelectorOp::EmptySet) return e;
  const Attribute& a = data.attribute(s.attribute);
  if (a.kind == AttributeKind::Nominal || a.kind == AttributeKind::Ordinal) {
    auto codes = data.codes(s.attribute);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      std::int32_t c = codes[i];
      if (c >= 0 && (s.op == SelectorOp::Eq ? c == s.code : c >= s.code)) e.set(i);
    }
    return e;
  }
  auto v = data.numbers(s.attribute);
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool hit = false;
    switch (s.op) {
      case SelectorOp::Gt: hit = v[i] > s.value; break;
      case SelectorOp::Ge: hit = v[i] >= s.value; break;
      case SelectorOp::Lt: hit = v[i] < s.value; break;
      case SelectorOp::Eq: hit = v[i] == s.value; break;
      case SelectorOp::EmptySet: break;
    }
    if (hit) e.set(i);
  }
  return e;
}

std::string format_selector(const Selector& s, const Dataset& data) {
  const Attribute& a = data.attribute(s.attribute);
  std::string out = a.name;
  out += ' ';
  out += op_text(s.op);
  out += ' ';
  if (s.op == SelectorOp::EmptySet) {
    out += kEmpty;
  } else if (a.kind == AttributeKind::Nominal || a.kind == AttributeKind::Ordinal) {
    out += a.categories.at(static_cast<std::size_t>(s.code));
  } else {
    out += format_number(s.value);
  }
  return out;
}

Selector parse_selector(std::string_view text, const Dataset& data) {
  text = trim(text);
  struct Op {
    std::string_view token;
    SelectorOp op;
  };
  static const Op ops[] = {{kIn, SelectorOp::EmptySet}, {kGe, SelectorOp::Ge}, {">=", SelectorOp::Ge},
                           {">", SelectorOp::Gt},       {"<", SelectorOp::Lt},  {"=", SelectorOp::Eq}};
  if (text.find(kLe) != std::string_view::npos || text.find("<=") != std::string_view::npos) {
    pattern_fail(PatternErrorKind::Syntax, "operator <= is not part of the pattern language: " + std::string(text));
  }
  std::size_t best = std::string_view::npos;
  const Op* chosen = nullptr;
  for (const Op& op : ops) {
    std::size_t pos = text.find(op.token);
    if (pos == std::string_view::npos) continue;
    if (pos < best || (pos == best && op.token.size() > chosen->token.size())) {
      best = pos;
      chosen = &op;
    }
  }
  if (!chosen) pattern_fail(PatternErrorKind::Syntax, "no operator in '" + std::string(text) + "'");
  std::string name(trim(text.substr(0, best)));
  std::string value(trim(text.substr(best + chosen->token.size())));
  if (name.empty()) pattern_fail(PatternErrorKind::Syntax, "missing attribute in '" + std::string(text) + "'");
  auto j = data.find_attribute(name);
  if (!j) pattern_fail(PatternErrorKind::UnknownAttribute, name);
  const Attribute& a = data.attribute(*j);

  Selector s;
  s.attribute = *j;
  s.op = chosen->op;
  if (s.op == SelectorOp::EmptySet) {
    if (value != kEmpty && value != "{}") pattern_fail(PatternErrorKind::Syntax, "only the empty set may follow ∈");
    if (a.kind != AttributeKind::Nominal && a.kind != AttributeKind::Ordinal) {
      pattern_fail(PatternErrorKind::TypeMismatch, name + " is not categorical");
    }
    return s;
  }
  if (value.empty()) pattern_fail(PatternErrorKind::Syntax, "missing value in '" + std::string(text) + "'");
  switch (a.kind) {
    case AttributeKind::Numeric: {
      auto v = parse_number(value);
      if (!v || std::isnan(*v)) pattern_fail(PatternErrorKind::TypeMismatch, name + " needs a number, got " + value);
      s.value = *v;
      break;
    }
    case AttributeKind::Boolean: {
      if (s.op != SelectorOp::Eq) pattern_fail(PatternErrorKind::TypeMismatch, name + " is boolean; use = 0 or = 1");
      std::string v = to_lower(value);
      if (v == "1" || v == "true") {
        s.value = 1.0;
      } else if (v == "0" || v == "false") {
        s.value = 0.0;
      } else {
        pattern_fail(PatternErrorKind::TypeMismatch, name + " is boolean, got " + value);
      }
      break;
    }
    case AttributeKind::Nominal:
    case AttributeKind::Ordinal: {
      if (s.op != SelectorOp::Eq && !(a.kind == AttributeKind::Ordinal && s.op == SelectorOp::Ge)) {
        pattern_fail(PatternErrorKind::TypeMismatch, name + " does not support " + std::string(chosen->token));
      }
      auto it = std::find(a.categories.begin(), a.categories.end(), value);
      if (it == a.categories.end()) pattern_fail(PatternErrorKind::UnknownCategory, name + " has no category " + value);
      s.code = static_cast<std::int32_t>(it - a.categories.begin());
      break;
    }
  }
  return s;
}

// ------------------------------------------------------------------ Pattern

Pattern::Pattern(std::vector<Selector> selectors) : selectors_(std::move(selectors)) {
  std::sort(selectors_.begin(), selectors_.end(),
            [](const Selector& a, const Selector& b) { return a.attribute < b.attribute; });
  for (std::size_t i = 1; i < selectors_.size(); ++i) {
    if (selectors_[i].attribute == selectors_[i - 1].attribute) {
      throw PatternError(PatternErrorKind::DuplicateAttribute,
                         "attribute #" + std::to_string(selectors_[i].attribute) + " constrained twice");
    }
  }
}

bool Pattern::constrains(std::size_t attribute) const {
  return std::any_of(selectors_.begin(), selectors_.end(), [&](const Selector& s) { return s.attribute == attribute; });
}

Pattern Pattern::with(const Selector& s) const {
  std::vector<Selector> next = selectors_;
  next.push_back(s);
  return Pattern(std::move(next));
}

std::string Pattern::to_string(const Dataset& data) const {
  std::string out;
  for (std::size_t i = 0; i < selectors_.size(); ++i) {
    if (i) out += kAnd;
    out += format_selector(selectors_[i], data);
  }
  return out;
}

bool covers(const Pattern& d, const Dataset& data, std::size_t obj) {
  return std::all_of(d.selectors().begin(), d.selectors().end(),
                     [&](const Selector& s) { return covers(s, data, obj); });
}

Extent extent(const Pattern& d, const Dataset& data) {
  Extent e(data.size(), true);
  for (const auto& s : d.selectors()) e &= selector_extent(s, data);
  return e;
}

Extent extent(const Extent& parent, const Selector& s, const Dataset& data) {
  return parent & selector_extent(s, data);
}

Pattern parse_pattern(std::string_view text, const Dataset& data) {
  if (trim(text).empty()) return Pattern();
  std::vector<Selector> sels;
  for (const auto& part : split_conjuncts(text)) {
    if (trim(part).empty()) pattern_fail(PatternErrorKind::Syntax, "empty conjunct in '" + std::string(text) + "'");
    sels.push_back(parse_selector(part, data));
  }
  return Pattern(std::move(sels));
}

}  // namespace wld
