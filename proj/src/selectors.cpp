#include "wld/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wld {

std::size_t SelectorCatalog::count_for(std::size_t attribute) const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) {
    return e.selector.attribute == attribute;
  }));
}

Pattern SelectorCatalog::pattern(const std::vector<std::uint32_t>& indices) const {
  std::vector<Selector> sels;
  sels.reserve(indices.size());
  for (auto i : indices) sels.push_back(entries.at(i).selector);
  return Pattern(std::move(sels));
}

std::string SelectorCatalog::text(const std::vector<std::uint32_t>& indices) const {
  std::vector<std::uint32_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());  // catalog order is attribute order
  std::string out;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k) out += kAnd;
    out += entries.at(sorted[k]).text;
  }
  return out;
}

std::vector<double> equal_frequency_cuts(std::vector<double> values, std::size_t bins) {
  std::vector<double> cuts;
  if (values.empty() || bins < 2) return cuts;
  std::sort(values.begin(), values.end());
  const std::size_t p = values.size();
  for (std::size_t i = 1; i < bins; ++i) {
    double c = values[(i * p) / bins];
    if (c <= values.front()) continue;
    if (cuts.empty() || cuts.back() != c) cuts.push_back(c);
  }
  return cuts;
}

namespace {

void push(SelectorCatalog& cat, const Dataset& data, Selector s) {
  Extent e = selector_extent(s, data);
  std::size_t c = e.count();
  if (c == 0 || c == data.size()) return;
  cat.entries.push_back({s, std::move(e), format_selector(s, data)});
}

}  // namespace

SelectorCatalog generate_selectors(const Dataset& data, const SelectorConfig& config) {
  std::set<std::size_t> excluded;
  for (const auto& name : config.exclude) excluded.insert(data.attribute_index(name));
  for (const auto& [name, mode] : config.numeric_modes) {
    (void)mode;
    if (data.attribute(data.attribute_index(name)).kind != AttributeKind::Numeric) {
      throw DatasetError(DatasetErrorKind::TypeConflict, name, "numeric mode set on a non-numeric attribute");
    }
  }

  SelectorCatalog cat;
  cat.universe = data.size();
  for (std::size_t j = 0; j < data.attribute_count(); ++j) {
    if (excluded.count(j)) continue;
    const Attribute& a = data.attribute(j);
    switch (a.kind) {
      case AttributeKind::Boolean:
        for (double v : {0.0, 1.0}) push(cat, data, Selector{j, SelectorOp::Eq, v, -1});
        break;
      case AttributeKind::Nominal: {
        for (std::size_t c = 0; c < a.categories.size(); ++c) {
          push(cat, data, Selector{j, SelectorOp::Eq, 0.0, static_cast<std::int32_t>(c)});
        }
        break;
      }
      case AttributeKind::Ordinal: {
        for (std::size_t c = 0; c < a.categories.size(); ++c) {
          auto code = static_cast<std::int32_t>(c);
          push(cat, data, Selector{j, SelectorOp::Eq, 0.0, code});
          push(cat, data, Selector{j, SelectorOp::Ge, 0.0, code});
        }
        break;
      }
      case AttributeKind::Numeric: {
        NumericMode mode = NumericMode::Auto;
        if (auto it = config.numeric_modes.find(a.name); it != config.numeric_modes.end()) mode = it->second;
        if (mode == NumericMode::Auto) {
          mode = a.source == Provenance::QueryToken ? NumericMode::TokenCount : NumericMode::General;
        }
        std::vector<double> col = data.numbers(j);
        if (mode == NumericMode::TokenCount) {
          std::vector<double> positive;
          for (double v : col) {
            if (v > 0) positive.push_back(v);
          }
          push(cat, data, Selector{j, SelectorOp::Gt, 0.0, -1});
          for (double c : equal_frequency_cuts(std::move(positive), config.bins)) {
            push(cat, data, Selector{j, SelectorOp::Ge, c, -1});
          }
        } else {
          std::vector<double> known;
          for (double v : col) {
            if (!std::isnan(v)) known.push_back(v);
          }
          auto cuts = equal_frequency_cuts(std::move(known), config.bins);
          for (double c : cuts) push(cat, data, Selector{j, SelectorOp::Lt, c, -1});
          for (double c : cuts) push(cat, data, Selector{j, SelectorOp::Ge, c, -1});
        }
        break;
      }
    }
  }
  return cat;
}

std::vector<std::vector<std::uint32_t>> refine(const std::vector<std::uint32_t>& parent, const SelectorCatalog& catalog,
                                               std::size_t max_depth) {
  std::vector<std::vector<std::uint32_t>> out;
  if (parent.size() >= max_depth) return out;
  std::size_t start = parent.empty() ? 0 : parent.back() + 1;
  for (std::size_t i = start; i < catalog.size(); ++i) {
    std::size_t attr = catalog[i].selector.attribute;
    bool taken = std::any_of(parent.begin(), parent.end(),
                             [&](std::uint32_t p) { return catalog[p].selector.attribute == attr; });
    if (taken) continue;
    auto child = parent;
    child.push_back(static_cast<std::uint32_t>(i));
    out.push_back(std::move(child));
  }
  return out;
}

}  // namespace wld
