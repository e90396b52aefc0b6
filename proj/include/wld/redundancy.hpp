#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wld/extent.hpp"
#include "wld/search.hpp"

namespace wld {

/// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double jaccard(const Extent& a, const Extent& b);

using SimilarityMatrix = std::vector<std::vector<double>>;
SimilarityMatrix similarity_matrix(const std::vector<Subgroup>& subgroups);

/// Walks `results` best-first; drops anything with Jaccard strictly above
/// theta to an already kept subgroup.
ResultSet greedy_select(const ResultSet& results, double theta);
/// Same rule over a best-first list; returns the kept positions.
std::vector<std::size_t> greedy_select_indices(const std::vector<Subgroup>& ranked, double theta);

struct DendrogramNode {
  std::size_t left = 0;   // node ids: 0..n-1 are leaves, n.. are merges
  std::size_t right = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<std::string> labels;    // canonical pattern per leaf
  std::vector<double> scores;         // per leaf
  std::vector<DendrogramNode> merges;  // in merge order, non-decreasing distance

  std::vector<std::size_t> members(std::size_t node) const;
};

/// Average linkage over 1 - Jaccard. Equal distances merge the pair whose
/// smallest leaf labels sort first.
Dendrogram hierarchical_cluster(const std::vector<Subgroup>& subgroups);

struct Cluster {
  std::vector<std::size_t> members;  // leaf indices, ascending
  std::size_t representative = 0;    // leaf index with the best score
};

struct Truncation {
  std::vector<Cluster> clusters;  // by representative rank
  std::size_t requested = 0;
  /// No distance threshold yields the requested count because of tied
  /// merge distances.
  bool infeasible = false;
};

/// Keeps merges at distance <= level.
Truncation truncate_at_distance(const Dendrogram& d, double level);
/// Undoes the last count-1 merges, so exactly `count` clusters come back;
/// `infeasible` marks a cut that splits tied merges. With `strict`, a tied
/// cut instead moves to the nearest count a distance threshold can produce
/// (fewer clusters first).
Truncation truncate_to_count(const Dendrogram& d, std::size_t count, bool strict = false);

}  // namespace wld
