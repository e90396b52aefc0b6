#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wld/dataset.hpp"
#include "wld/extent.hpp"
#include "wld/measures.hpp"
#include "wld/pattern.hpp"
#include "wld/selectors.hpp"

namespace wld {

enum class Algorithm { DepthFirst, Beam };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);  // "dfs"/"depth_first", "beam"; throws ConfigError

struct SearchConfig {
  std::size_t k = 10;
  std::size_t depth = 3;
  std::size_t min_support = 10;  // absolute extent size
  MeasureSpec measure;
  Algorithm algorithm = Algorithm::DepthFirst;
  std::size_t beam_width = 50;
  std::optional<double> time_budget_seconds;
  std::size_t threads = 1;
  bool prune = true;  // optimistic-estimate pruning; off only for testing
  SelectorConfig selectors;
};

/// Throws ConfigError on k, depth or min_support of 0, or beam width < k.
void validate(const SearchConfig& config);

/// Shared with a running search: cancellation in, progress out.
struct SearchControl {
  std::atomic<bool> cancel{false};
  std::atomic<double> progress{0.0};
};

struct Subgroup {
  Pattern pattern;
  std::string text;  // canonical form
  Extent extent;
  SubgroupStats stats;
  Score score;
};

struct ResultSet {
  std::vector<Subgroup> entries;  // score desc, depth asc, text asc
  MeasureSpec measure;
  GlobalStats global;
  bool incomplete = false;  // time budget hit or cancelled
  bool cancelled = false;
  std::size_t evaluated = 0;  // nodes scored; varies with thread count
  std::size_t pruned = 0;
};

/// Total result order: score desc, depth asc, canonical string asc.
bool ranks_before(double score_a, std::size_t depth_a, std::string_view text_a, double score_b, std::size_t depth_b,
                  std::string_view text_b);

ResultSet depth_first_search(const Dataset& data, const Target& target, const SelectorCatalog& catalog,
                             const SearchConfig& config, SearchControl* control = nullptr);
ResultSet beam_search(const Dataset& data, const Target& target, const SelectorCatalog& catalog,
                      const SearchConfig& config, SearchControl* control = nullptr);

/// Builds the catalog (target attribute excluded) and runs the configured algorithm.
ResultSet mine(const Dataset& data, const Target& target, const SearchConfig& config,
               SearchControl* control = nullptr);

/// Throws MeasureError("EmptyExtent...") when nothing is covered.
Subgroup evaluate_pattern(const Dataset& data, const Target& target, const MeasureSpec& measure,
                          const Pattern& pattern);

}  // namespace wld
