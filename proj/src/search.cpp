#include "wld/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include "wld/errors.hpp"
#include "wld/text.hpp"

namespace wld {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using Indices = std::vector<std::uint32_t>;
using Clock = std::chrono::steady_clock;

struct Candidate {
  double score = 0.0;
  Indices selectors;  // ascending catalog indices
  std::string text;
};

bool better(const Candidate& a, const Candidate& b) {
  return ranks_before(a.score, a.selectors.size(), a.text, b.score, b.selectors.size(), b.text);
}

class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  bool full() const { return items_.size() >= k_; }
  double floor() const { return full() ? items_.back().score : kNegInf; }

  /// Returns true when the candidate was kept.
  bool offer(double score, const Indices& sel, const SelectorCatalog& cat) {
    if (full() && score < items_.back().score) return false;
    Candidate c{score, sel, cat.text(sel)};
    return insert(std::move(c));
  }

  bool insert(Candidate c) {
    auto pos = std::lower_bound(items_.begin(), items_.end(), c, better);
    if (static_cast<std::size_t>(pos - items_.begin()) >= k_) return false;
    items_.insert(pos, std::move(c));
    if (items_.size() > k_) items_.pop_back();
    return true;
  }

  std::vector<Candidate>& items() { return items_; }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

void raise_floor(std::atomic<double>& shared, double value) {
  double cur = shared.load(std::memory_order_relaxed);
  while (value > cur && !shared.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

struct Budget {
  Budget(const SearchConfig& config, SearchControl* ctl) : control(ctl) {
    if (config.time_budget_seconds) {
      deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(*config.time_budget_seconds));
    }
  }

  std::optional<Clock::time_point> deadline;
  SearchControl* control = nullptr;
  std::atomic<bool> stop{false};
  std::atomic<bool> timed_out{false};

  bool should_stop() {
    if (stop.load(std::memory_order_relaxed)) return true;
    if (control && control->cancel.load(std::memory_order_relaxed)) {
      stop = true;
      return true;
    }
    if (deadline && Clock::now() >= *deadline) {
      timed_out = true;
      stop = true;
      return true;
    }
    return false;
  }
};

struct Evaluator {
  const std::vector<double>& t;
  const GlobalStats& g;
  const MeasureSpec& m;

  double score(const Extent& e) const { return wld::score(m, compute_stats(e, t, g, m.needs_median()), g).value; }
  double bound(const Extent& e) const { return optimistic_estimate(m, e, t, g); }
};

ResultSet finish(const Dataset& data, const Target& target, const SelectorCatalog& catalog, const SearchConfig& config,
                 const GlobalStats& g, std::vector<Candidate> best) {
  ResultSet rs;
  rs.measure = config.measure;
  rs.global = g;
  for (auto& c : best) {
    Subgroup sg;
    sg.pattern = catalog.pattern(c.selectors);
    sg.text = std::move(c.text);
    sg.extent = Extent(data.size(), true);
    for (auto i : c.selectors) sg.extent &= catalog[i].extent;
    sg.stats = compute_stats(sg.extent, target.values, g, true);
    sg.score = score(config.measure, sg.stats, g);
    rs.entries.push_back(std::move(sg));
  }
  return rs;
}

void check_measure(const SearchConfig& config, const GlobalStats& g) {
  if (config.measure.family == MeasureFamily::Lift && !(g.mean > 0.0)) {
    throw ConfigError("lift needs a target with positive mean");
  }
}

}  // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::Beam ? "beam" : "dfs"; }

Algorithm parse_algorithm(std::string_view s) {
  std::string v = to_lower(std::string(s));
  if (v == "dfs" || v == "depth_first" || v == "depth-first") return Algorithm::DepthFirst;
  if (v == "beam") return Algorithm::Beam;
  throw ConfigError("unknown algorithm: " + std::string(s) + " (valid: dfs, beam)");
}

void validate(const SearchConfig& c) {
  if (c.k < 1) throw ConfigError("k must be at least 1");
  if (c.depth < 1) throw ConfigError("depth must be at least 1");
  if (c.min_support < 1) throw ConfigError("min support must be at least 1");
  if (c.algorithm == Algorithm::Beam && c.beam_width < c.k) throw ConfigError("beam width must be at least k");
  if (c.selectors.bins < 2) throw ConfigError("bins must be at least 2");
  if (c.time_budget_seconds && !(*c.time_budget_seconds > 0)) throw ConfigError("time budget must be positive");
}

bool ranks_before(double sa, std::size_t da, std::string_view ta, double sb, std::size_t db, std::string_view tb) {
  if (sa != sb) return sa > sb;
  if (da != db) return da < db;
  return ta < tb;
}

// ------------------------------------------------------------ depth-first

ResultSet depth_first_search(const Dataset& data, const Target& target, const SelectorCatalog& catalog,
                             const SearchConfig& config, SearchControl* control) {
  validate(config);
  const GlobalStats g = global_stats(target.values, target.binary);
  check_measure(config, g);
  const Evaluator ev{target.values, g, config.measure};
  Budget budget(config, control);
  std::atomic<double> shared_floor{kNegInf};
  std::atomic<std::size_t> next_branch{0};
  std::atomic<std::size_t> done_branches{0};
  std::atomic<std::size_t> evaluated{0};
  std::atomic<std::size_t> pruned{0};
  const std::size_t branches = catalog.size();

  auto worker = [&](TopK& top) {
    std::vector<Extent> scratch(config.depth + 1, Extent(data.size()));
    Indices path;
    std::size_t local_eval = 0;
    std::size_t local_pruned = 0;

    auto floor = [&] { return std::max(top.floor(), shared_floor.load(std::memory_order_relaxed)); };
    auto visit = [&](std::size_t j, const Extent& child, std::size_t level, auto& self) -> void {
      path.push_back(static_cast<std::uint32_t>(j));
      ++local_eval;
      if (top.offer(ev.score(child), path, catalog) && top.full()) raise_floor(shared_floor, top.floor());
      if (level < config.depth) {
        if (config.prune && ev.bound(child) < floor()) {
          ++local_pruned;
        } else {
          const std::size_t attr = catalog[j].selector.attribute;
          for (std::size_t c = j + 1; c < catalog.size(); ++c) {
            if (catalog[c].selector.attribute == attr) continue;
            if ((local_eval & 255) == 0 && budget.should_stop()) break;
            if (budget.stop.load(std::memory_order_relaxed)) break;
            Extent& grand = scratch[level + 1];
            if (Extent::intersect_into(child, catalog[c].extent, grand) < config.min_support) continue;
            self(c, grand, level + 1, self);
          }
        }
      }
      path.pop_back();
    };

    for (std::size_t j = next_branch++; j < branches; j = next_branch++) {
      if (budget.should_stop()) break;
      const Extent& e = catalog[j].extent;
      if (e.count() >= config.min_support) {
        scratch[1] = e;
        visit(j, scratch[1], 1, visit);
      }
      std::size_t done = ++done_branches;
      if (control) control->progress.store(static_cast<double>(done) / static_cast<double>(branches));
    }
    evaluated += local_eval;
    pruned += local_pruned;
  };

  const std::size_t nthreads = std::max<std::size_t>(1, std::min(config.threads, std::max<std::size_t>(1, branches)));
  std::vector<TopK> tops(nthreads, TopK(config.k));
  if (nthreads == 1) {
    worker(tops[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(worker, std::ref(tops[w]));
    for (auto& th : pool) th.join();
  }

  TopK merged(config.k);
  for (auto& t : tops) {
    for (auto& c : t.items()) merged.insert(std::move(c));
  }
  ResultSet rs = finish(data, target, catalog, config, g, std::move(merged.items()));
  rs.evaluated = evaluated;
  rs.pruned = pruned;
  rs.cancelled = control && control->cancel.load();
  rs.incomplete = rs.cancelled || budget.timed_out;
  if (control && !rs.incomplete) control->progress.store(1.0);
  return rs;
}

// ------------------------------------------------------------------- beam

ResultSet beam_search(const Dataset& data, const Target& target, const SelectorCatalog& catalog,
                      const SearchConfig& config, SearchControl* control) {
  validate(config);
  const GlobalStats g = global_stats(target.values, target.binary);
  check_measure(config, g);
  const Evaluator ev{target.values, g, config.measure};
  Budget budget(config, control);

  TopK overall(config.k);
  std::vector<Indices> beam{Indices{}};
  std::size_t evaluated = 0;

  for (std::size_t level = 1; level <= config.depth && !beam.empty(); ++level) {
    // every child of every beam member, deduplicated by selector set
    std::set<Indices> seen;
    std::vector<Indices> children;
    for (const auto& member : beam) {
      for (std::size_t c = 0; c < catalog.size(); ++c) {
        const std::size_t attr = catalog[c].selector.attribute;
        bool taken = std::any_of(member.begin(), member.end(),
                                 [&](std::uint32_t p) { return catalog[p].selector.attribute == attr; });
        if (taken) continue;
        Indices child = member;
        child.insert(std::upper_bound(child.begin(), child.end(), c), static_cast<std::uint32_t>(c));
        if (seen.insert(child).second) children.push_back(std::move(child));
      }
    }

    // score in parallel, merge in child order
    std::vector<std::optional<double>> scores(children.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      Extent e(data.size());
      for (std::size_t i = next++; i < children.size(); i = next++) {
        if ((i & 255) == 0 && budget.should_stop()) break;
        if (budget.stop.load(std::memory_order_relaxed)) break;
        e = catalog[children[i][0]].extent;
        for (std::size_t p = 1; p < children[i].size(); ++p) e &= catalog[children[i][p]].extent;
        if (e.count() < config.min_support) continue;
        scores[i] = ev.score(e);
      }
    };
    const std::size_t nthreads = std::max<std::size_t>(1, std::min(config.threads, children.size()));
    if (nthreads == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    if (budget.stop) break;

    TopK next_beam(config.beam_width);
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (!scores[i]) continue;
      ++evaluated;
      overall.offer(*scores[i], children[i], catalog);
      next_beam.offer(*scores[i], children[i], catalog);
    }
    beam.clear();
    for (auto& c : next_beam.items()) beam.push_back(std::move(c.selectors));
    if (control) control->progress.store(static_cast<double>(level) / static_cast<double>(config.depth));
  }

  ResultSet rs = finish(data, target, catalog, config, g, std::move(overall.items()));
  rs.evaluated = evaluated;
  rs.cancelled = control && control->cancel.load();
  rs.incomplete = rs.cancelled || budget.timed_out;
  if (control && !rs.incomplete) control->progress.store(1.0);
  return rs;
}

ResultSet mine(const Dataset& data, const Target& target, const SearchConfig& config, SearchControl* control) {
  validate(config);
  SelectorConfig sc = config.selectors;
  if (target.attribute) {
    const std::string& name = data.attribute(*target.attribute).name;
    if (std::find(sc.exclude.begin(), sc.exclude.end(), name) == sc.exclude.end()) sc.exclude.push_back(name);
  }
  SelectorCatalog catalog = generate_selectors(data, sc);
  return config.algorithm == Algorithm::Beam ? beam_search(data, target, catalog, config, control)
                                             : depth_first_search(data, target, catalog, config, control);
}

Subgroup evaluate_pattern(const Dataset& data, const Target& target, const MeasureSpec& measure,
                          const Pattern& pattern) {
  const GlobalStats g = global_stats(target.values, target.binary);
  Subgroup sg;
  sg.pattern = pattern;
  sg.text = pattern.to_string(data);
  sg.extent = extent(pattern, data);
  if (sg.extent.empty()) throw MeasureError("EmptyExtent: pattern covers no object");
  sg.stats = compute_stats(sg.extent, target.values, g, true);
  sg.score = score(measure, sg.stats, g);
  return sg;
}

}  // namespace wld
