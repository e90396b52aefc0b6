#include "support/oracle.hpp"

#include <algorithm>

#include "wld/measures.hpp"
#include "wld/pattern.hpp"

namespace oracle {

std::vector<Row> naive_top_k(const wld::Dataset& data, const wld::Target& target, const wld::SelectorCatalog& catalog,
                             const wld::SearchConfig& config) {
  const wld::GlobalStats g = wld::global_stats(target.values, target.binary);
  struct Scored {
    Row row;
    std::size_t depth;
  };
  std::vector<Scored> all;
  std::vector<wld::Selector> chosen;

  auto rec = [&](std::size_t from, auto& self) -> void {
    for (std::size_t c = from; c < catalog.size(); ++c) {
      const wld::Selector& s = catalog[c].selector;
      bool clash = std::any_of(chosen.begin(), chosen.end(), [&](const wld::Selector& x) { return x.attribute == s.attribute; });
      if (clash) continue;
      chosen.push_back(s);
      wld::Pattern p(chosen);
      wld::Extent e(data.size());
      for (std::size_t o = 0; o < data.size(); ++o) {
        if (wld::covers(p, data, o)) e.set(o);
      }
      const std::size_t size = e.count();
      if (size >= config.min_support) {
        auto st = wld::compute_stats(e, target.values, g, true);
        all.push_back({{p.to_string(data), wld::score(config.measure, st, g).value, size}, p.depth()});
      }
      // no support pruning here on purpose: enumerate everything
      if (chosen.size() < config.depth) self(c + 1, self);
      chosen.pop_back();
    }
  };
  rec(0, rec);

  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    return wld::ranks_before(a.row.score, a.depth, a.row.text, b.row.score, b.depth, b.row.text);
  });
  std::vector<Row> out;
  for (std::size_t i = 0; i < all.size() && i < config.k; ++i) out.push_back(all[i].row);
  return out;
}

std::vector<Row> rows(const wld::ResultSet& rs) {
  std::vector<Row> out;
  for (const auto& e : rs.entries) out.push_back({e.text, e.score.value, e.stats.size});
  return out;
}

}  // namespace oracle
