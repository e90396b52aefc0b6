#include "wld/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wld/errors.hpp"
#include "wld/text.hpp"

namespace wld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power(double sup, double a) {
  if (a == 0.0) return 1.0;
  if (a == 1.0) return sup;
  if (a == 0.5) return std::sqrt(sup);
  return std::pow(sup, a);
}

}  // namespace

std::string MeasureSpec::name() const {
  switch (family) {
    case MeasureFamily::Klosgen: return "klosgen:" + format_number(a);
    case MeasureFamily::Unusualness: return "unusualness";
    case MeasureFamily::Lift: return "lift";
    case MeasureFamily::WRAcc: return "wracc";
    case MeasureFamily::MeanTest: return "mean_test";
    case MeasureFamily::TScore: return "tscore";
    case MeasureFamily::QMed: return "qmed:" + format_number(a);
    case MeasureFamily::Support: return "support";
  }
  return "?";
}

MeasureSpec parse_measure(std::string_view text) {
  std::string s = to_lower(std::string(trim(text)));
  std::string head = s;
  std::optional<double> a;
  if (auto colon = s.find(':'); colon != std::string::npos) {
    head = s.substr(0, colon);
    a = parse_number(s.substr(colon + 1));
    if (!a || !(*a >= 0.0 && *a <= 1.0)) throw ConfigError("measure exponent must be in [0,1]: " + std::string(text));
  }
  MeasureSpec m;
  if (head == "klosgen") {
    m.family = MeasureFamily::Klosgen;
  } else if (head == "qmed" || head == "q_med") {
    m.family = MeasureFamily::QMed;
  } else if (head == "unusualness") {
    m.family = MeasureFamily::Unusualness;
  } else if (head == "lift") {
    m.family = MeasureFamily::Lift;
  } else if (head == "wracc") {
    m.family = MeasureFamily::WRAcc;
  } else if (head == "mean_test" || head == "meantest" || head == "binomial") {
    m.family = MeasureFamily::MeanTest;
  } else if (head == "tscore" || head == "t_score") {
    m.family = MeasureFamily::TScore;
  } else if (head == "support") {
    m.family = MeasureFamily::Support;
  } else {
    throw ConfigError("unknown measure: " + std::string(text) +
                      " (valid: klosgen:<a>, unusualness, lift, wracc, mean_test, tscore, qmed:<a>, support)");
  }
  if (a) {
    if (m.family != MeasureFamily::Klosgen && m.family != MeasureFamily::QMed) {
      throw ConfigError("measure takes no exponent: " + std::string(text));
    }
    m.a = *a;
  }
  return m;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  double hi = v[h];
  if (v.size() % 2) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return (lo + hi) / 2.0;
}

GlobalStats global_stats(const std::vector<double>& target, bool binary) {
  GlobalStats g;
  g.n = target.size();
  g.binary = binary;
  if (g.n == 0) throw MeasureError("EmptySubgroup: no objects");
  double sum = 0.0;
  for (double v : target) sum += v;
  g.mean = sum / static_cast<double>(g.n);
  g.median = median_of(target);
  if (binary) g.positives = static_cast<std::size_t>(std::count(target.begin(), target.end(), 1.0));
  g.order_desc.resize(g.n);
  std::iota(g.order_desc.begin(), g.order_desc.end(), 0u);
  std::stable_sort(g.order_desc.begin(), g.order_desc.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return target[x] > target[y]; });
  return g;
}

SubgroupStats compute_stats(const Extent& s, const std::vector<double>& target, const GlobalStats& g,
                            bool with_median) {
  SubgroupStats st;
  double sum = 0.0;
  std::size_t count = 0;
  s.for_each([&](std::size_t i) {
    sum += target[i];
    ++count;
  });
  if (count == 0) throw MeasureError("EmptySubgroup: extent is empty");
  st.size = count;
  st.sup = static_cast<double>(count) / static_cast<double>(g.n);
  st.mean = sum / static_cast<double>(count);
  double sq = 0.0;
  s.for_each([&](std::size_t i) {
    double d = target[i] - st.mean;
    sq += d * d;
  });
  st.std = std::sqrt(sq / static_cast<double>(count));
  if (with_median) {
    std::vector<double> vals;
    vals.reserve(count);
    s.for_each([&](std::size_t i) { vals.push_back(target[i]); });
    st.median = median_of(std::move(vals));
  } else {
    st.median = std::numeric_limits<double>::quiet_NaN();
  }
  if (g.binary) {
    // target is 0/1, so the sum is the positive count
    st.positives = static_cast<std::size_t>(std::llround(sum));
    st.precision = sum / static_cast<double>(count);
  }
  return st;
}

double klosgen(const SubgroupStats& s, const GlobalStats& g, double a) { return power(s.sup, a) * (s.mean - g.mean); }
double unusualness(const SubgroupStats& s, const GlobalStats& g) { return klosgen(s, g, 0.0); }
double wracc(const SubgroupStats& s, const GlobalStats& g) { return klosgen(s, g, 1.0); }
double mean_test(const SubgroupStats& s, const GlobalStats& g) { return klosgen(s, g, 0.5); }

double lift(const SubgroupStats& s, const GlobalStats& g) {
  if (!(g.mean > 0.0)) throw MeasureError("lift needs a positive target mean");
  return s.mean / g.mean;
}

double wracc_probability(const SubgroupStats& s, const GlobalStats& g) {
  const double n = static_cast<double>(g.n);
  return static_cast<double>(s.positives) / n - (static_cast<double>(s.size) / n) * (static_cast<double>(g.positives) / n);
}

double t_score(const SubgroupStats& s, const GlobalStats& g) {
  const double delta = s.mean - g.mean;
  if (s.std == 0.0) {
    if (delta == 0.0) return 0.0;
    return delta > 0 ? kInf : -kInf;
  }
  return (std::sqrt(s.sup) / s.std) * delta;
}

double q_med(const SubgroupStats& s, const GlobalStats& g, double a) { return power(s.sup, a) * (s.median - g.median); }

Score score(const MeasureSpec& m, const SubgroupStats& s, const GlobalStats& g) {
  switch (m.family) {
    case MeasureFamily::Klosgen: return {klosgen(s, g, m.a), false};
    case MeasureFamily::Unusualness: return {unusualness(s, g), false};
    case MeasureFamily::Lift: return {lift(s, g), false};
    case MeasureFamily::WRAcc: return {wracc(s, g), false};
    case MeasureFamily::MeanTest: return {mean_test(s, g), false};
    case MeasureFamily::TScore: return {t_score(s, g), s.std == 0.0 && s.mean != g.mean};
    case MeasureFamily::QMed: return {q_med(s, g, m.a), false};
    case MeasureFamily::Support: return {s.sup, false};
  }
  return {};
}

namespace {

// Target values of s, largest first. Small extents are gathered and sorted;
// large ones walk the global descending order.
std::vector<double> descending_values(const Extent& s, const std::vector<double>& target, const GlobalStats& g) {
  std::vector<double> vals;
  const std::size_t c = s.count();
  vals.reserve(c);
  if (c * 16 < g.n) {
    s.for_each([&](std::size_t i) { vals.push_back(target[i]); });
    std::sort(vals.begin(), vals.end(), std::greater<>());
  } else {
    for (std::uint32_t o : g.order_desc) {
      if (s.test(o)) vals.push_back(target[o]);
    }
  }
  return vals;
}

// max over i of (i/n)^a (mean of the i largest values in s - mu)
double top_prefix_bound(const Extent& s, const std::vector<double>& target, const GlobalStats& g, double a) {
  const auto vals = descending_values(s, target, g);
  if (vals.empty()) return -kInf;
  if (a == 0.0) return vals.front() - g.mean;  // the single largest value dominates
  double best = -kInf;
  double sum = 0.0;
  const double n = static_cast<double>(g.n);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    sum += vals[i];
    const double di = static_cast<double>(i + 1);
    best = std::max(best, power(di / n, a) * (sum / di - g.mean));
  }
  return best;
}

double max_in(const Extent& s, const std::vector<double>& target, const GlobalStats& g) {
  if (s.count() * 16 < g.n) {
    double m = -kInf;
    s.for_each([&](std::size_t i) { m = std::max(m, target[i]); });
    return m;
  }
  for (std::uint32_t o : g.order_desc) {
    if (s.test(o)) return target[o];
  }
  return -kInf;
}

}  // namespace

double optimistic_estimate(const MeasureSpec& m, const Extent& s, const std::vector<double>& target,
                           const GlobalStats& g) {
  double bound = 0.0;
  switch (m.family) {
    case MeasureFamily::Klosgen: bound = top_prefix_bound(s, target, g, m.a); break;
    case MeasureFamily::Unusualness: bound = top_prefix_bound(s, target, g, 0.0); break;
    case MeasureFamily::WRAcc: bound = top_prefix_bound(s, target, g, 1.0); break;
    case MeasureFamily::MeanTest: bound = top_prefix_bound(s, target, g, 0.5); break;
    case MeasureFamily::Lift: {
      if (!(g.mean > 0.0)) throw MeasureError("lift needs a positive target mean");
      bound = max_in(s, target, g) / g.mean;
      break;
    }
    case MeasureFamily::TScore: {
      // A singleton subset has zero dispersion, so anything above the mean
      // can reach +inf; otherwise every subset scores at most 0.
      return max_in(s, target, g) > g.mean ? kInf : 0.0;
    }
    case MeasureFamily::QMed: {
      const double d = max_in(s, target, g) - g.median;
      const double sup = static_cast<double>(s.count()) / static_cast<double>(g.n);
      bound = d >= 0 ? power(sup, m.a) * d : power(1.0 / static_cast<double>(g.n), m.a) * d;
      break;
    }
    case MeasureFamily::Support: bound = static_cast<double>(s.count()) / static_cast<double>(g.n); break;
  }
  // absorbs the rounding gap between differently ordered sums
  return bound + 1e-9 * (1.0 + std::fabs(bound));
}

double precision(const Extent& s, const std::vector<double>& target) {
  double pos = 0.0;
  std::size_t count = 0;
  s.for_each([&](std::size_t i) {
    pos += target[i];
    ++count;
  });
  if (count == 0) throw MeasureError("EmptySubgroup: extent is empty");
  return pos / static_cast<double>(count);
}

}  // namespace wld
