#include "wld/redundancy.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "wld/errors.hpp"

namespace wld {

double jaccard(const Extent& a, const Extent& b) {
  const std::size_t u = Extent::union_count(a, b);
  if (u == 0) return 1.0;
  return static_cast<double>(Extent::intersection_count(a, b)) / static_cast<double>(u);
}

SimilarityMatrix similarity_matrix(const std::vector<Subgroup>& sg) {
  SimilarityMatrix m(sg.size(), std::vector<double>(sg.size(), 1.0));
  for (std::size_t i = 0; i < sg.size(); ++i) {
    for (std::size_t j = i + 1; j < sg.size(); ++j) m[i][j] = m[j][i] = jaccard(sg[i].extent, sg[j].extent);
  }
  return m;
}

std::vector<std::size_t> greedy_select_indices(const std::vector<Subgroup>& ranked, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must be in [0,1]");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    bool redundant = std::any_of(kept.begin(), kept.end(),
                                 [&](std::size_t k) { return jaccard(ranked[k].extent, ranked[i].extent) > theta; });
    if (!redundant) kept.push_back(i);
  }
  return kept;
}

ResultSet greedy_select(const ResultSet& results, double theta) {
  ResultSet out = results;
  out.entries.clear();
  for (std::size_t i : greedy_select_indices(results.entries, theta)) out.entries.push_back(results.entries[i]);
  return out;
}

std::vector<std::size_t> Dendrogram::members(std::size_t node) const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    if (x < leaves) {
      out.push_back(x);
    } else {
      stack.push_back(merges[x - leaves].left);
      stack.push_back(merges[x - leaves].right);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dendrogram hierarchical_cluster(const std::vector<Subgroup>& sg) {
  if (sg.empty()) throw ConfigError("clustering needs at least one subgroup");
  const std::size_t n = sg.size();
  Dendrogram d;
  d.leaves = n;
  for (const auto& s : sg) {
    d.labels.push_back(s.text);
    d.scores.push_back(s.score.value);
  }

  // active clusters: node id, size, smallest leaf label
  struct Active {
    std::size_t node;
    std::size_t size;
    std::string key;
  };
  std::vector<Active> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, 1, d.labels[i]});
  // dist[i][j] between active slots
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = 1.0 - jaccard(sg[i].extent, sg[j].extent);
  }

  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    std::string bk1, bk2;
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const std::string& k1 = std::min(active[i].key, active[j].key);
        const std::string& k2 = std::max(active[i].key, active[j].key);
        if (dist[i][j] < best || (dist[i][j] == best && std::tie(k1, k2) < std::tie(bk1, bk2))) {
          best = dist[i][j];
          bi = i;
          bj = j;
          bk1 = k1;
          bk2 = k2;
        }
      }
    }
    const Active& a = active[bi];
    const Active& b = active[bj];
    // left child is the one with the smaller label
    DendrogramNode node{a.key <= b.key ? a.node : b.node, a.key <= b.key ? b.node : a.node, best, a.size + b.size};
    // a later merge never sits below an earlier one
    if (!d.merges.empty()) node.distance = std::max(node.distance, d.merges.back().distance);
    d.merges.push_back(node);

    // UPGMA update into slot bi, drop slot bj
    const double wa = static_cast<double>(a.size), wb = static_cast<double>(b.size);
    for (std::size_t x = 0; x < active.size(); ++x) {
      if (x == bi || x == bj) continue;
      double v = (wa * dist[bi][x] + wb * dist[bj][x]) / (wa + wb);
      dist[bi][x] = dist[x][bi] = v;
    }
    active[bi] = {n + d.merges.size() - 1, a.size + b.size, std::min(a.key, b.key)};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bj));
    for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return d;
}

namespace {

// Clusters left after applying the first `kept` merges.
Truncation cut(const Dendrogram& d, std::size_t kept) {
  std::vector<std::size_t> roots(d.leaves);
  std::iota(roots.begin(), roots.end(), 0);
  std::vector<bool> alive(d.leaves + d.merges.size(), false);
  for (std::size_t i = 0; i < d.leaves; ++i) alive[i] = true;
  for (std::size_t m = 0; m < kept; ++m) {
    alive[d.merges[m].left] = false;
    alive[d.merges[m].right] = false;
    alive[d.leaves + m] = true;
  }
  Truncation t;
  for (std::size_t node = 0; node < d.leaves + kept; ++node) {
    if (!alive[node]) continue;
    Cluster c;
    c.members = d.members(node);
    c.representative = c.members.front();
    for (std::size_t leaf : c.members) {
      if (ranks_before(d.scores[leaf], 0, d.labels[leaf], d.scores[c.representative], 0, d.labels[c.representative])) {
        c.representative = leaf;
      }
    }
    t.clusters.push_back(std::move(c));
  }
  std::sort(t.clusters.begin(), t.clusters.end(), [&](const Cluster& a, const Cluster& b) {
    return ranks_before(d.scores[a.representative], 0, d.labels[a.representative], d.scores[b.representative], 0,
                        d.labels[b.representative]);
  });
  return t;
}

}  // namespace

Truncation truncate_at_distance(const Dendrogram& d, double level) {
  if (!(level >= 0.0)) throw ConfigError("cut distance must be non-negative");
  std::size_t kept = 0;
  while (kept < d.merges.size() && d.merges[kept].distance <= level) ++kept;
  Truncation t = cut(d, kept);
  t.requested = t.clusters.size();
  return t;
}

Truncation truncate_to_count(const Dendrogram& d, std::size_t count, bool strict) {
  if (count < 1 || count > d.leaves) throw ConfigError("cluster count must be between 1 and the leaf count");
  // count c keeps the first n-c merges; that is a distance cut only when the
  // next merge is strictly farther
  auto feasible = [&](std::size_t c) {
    std::size_t kept = d.leaves - c;
    return kept == 0 || kept == d.merges.size() || d.merges[kept - 1].distance < d.merges[kept].distance;
  };
  std::size_t chosen = count;
  if (!feasible(count) && strict) {
    for (std::size_t delta = 1;; ++delta) {
      if (count > delta && feasible(count - delta)) {
        chosen = count - delta;
        break;
      }
      if (count + delta <= d.leaves && feasible(count + delta)) {
        chosen = count + delta;
        break;
      }
    }
  }
  Truncation t = cut(d, d.leaves - chosen);
  t.requested = count;
  t.infeasible = !feasible(count);
  return t;
}

}  // namespace wld
