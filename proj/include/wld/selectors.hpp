#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wld/dataset.hpp"
#include "wld/extent.hpp"
#include "wld/pattern.hpp"

namespace wld {

enum class NumericMode { Auto, TokenCount, General };

struct SelectorConfig {
  std::size_t bins = 5;
  /// Per-attribute override; Auto means token-count for query tokens,
  /// general otherwise.
  std::map<std::string, NumericMode> numeric_modes;
  /// Attributes that never appear in patterns (typically the target).
  std::vector<std::string> exclude;
};

struct CatalogEntry {
  Selector selector;
  Extent extent;
  std::string text;
};

/// All candidate selectors for a run, ordered by attribute index then
/// generation order. The position in `entries` is the canonical index.
struct SelectorCatalog {
  std::vector<CatalogEntry> entries;
  std::size_t universe = 0;

  std::size_t size() const { return entries.size(); }
  const CatalogEntry& operator[](std::size_t i) const { return entries[i]; }
  std::size_t count_for(std::size_t attribute) const;
  Pattern pattern(const std::vector<std::uint32_t>& indices) const;
  std::string text(const std::vector<std::uint32_t>& indices) const;
};

/// Equal-frequency cuts: sorted[floor(i*p/bins)] for i = 1..bins-1,
/// deduplicated, cuts at or below the minimum dropped.
std::vector<double> equal_frequency_cuts(std::vector<double> values, std::size_t bins);

/// Selectors that cover nothing or every object are not emitted, so a
/// constant attribute contributes none.
SelectorCatalog generate_selectors(const Dataset& data, const SelectorConfig& config = {});

/// Children of `parent` (given as catalog indices, in the order added):
/// one more selector with a larger canonical index on a new attribute.
/// Empty once `max_depth` is reached.
std::vector<std::vector<std::uint32_t>> refine(const std::vector<std::uint32_t>& parent, const SelectorCatalog& catalog,
                                               std::size_t max_depth);

}  // namespace wld
