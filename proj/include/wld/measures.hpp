#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wld/extent.hpp"

namespace wld {

enum class MeasureFamily { Klosgen, Unusualness, Lift, WRAcc, MeanTest, TScore, QMed, Support };

struct MeasureSpec {
  MeasureFamily family = MeasureFamily::Klosgen;
  double a = 0.5;  // only meaningful for Klosgen and QMed

  std::string name() const;  // round-trips through parse_measure
  bool needs_median() const { return family == MeasureFamily::QMed; }
  bool operator==(const MeasureSpec&) const = default;
};

/// `klosgen:0.5`, `wracc`, `lift`, `unusualness`, `mean_test`, `tscore`,
/// `qmed:0`, `support`. Throws ConfigError.
MeasureSpec parse_measure(std::string_view text);

class MeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whole-dataset quantities shared by every subgroup evaluation.
struct GlobalStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  bool binary = false;
  std::size_t positives = 0;
  std::vector<std::uint32_t> order_desc;  // object indices by target value, descending
};

GlobalStats global_stats(const std::vector<double>& target, bool binary);

struct SubgroupStats {
  std::size_t size = 0;
  double sup = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // population convention
  std::size_t positives = 0;
  std::optional<double> precision;  // binary targets only
};

/// Sums run in ascending object order so every caller gets identical bits.
/// Throws MeasureError on an empty extent.
SubgroupStats compute_stats(const Extent& s, const std::vector<double>& target, const GlobalStats& global,
                            bool with_median = true);

double median_of(std::vector<double> values);

double klosgen(const SubgroupStats& s, const GlobalStats& g, double a);
double unusualness(const SubgroupStats& s, const GlobalStats& g);
double lift(const SubgroupStats& s, const GlobalStats& g);
double wracc(const SubgroupStats& s, const GlobalStats& g);
/// Pr(o in s and t=1) - Pr(o in s) Pr(t=1), for binary targets.
double wracc_probability(const SubgroupStats& s, const GlobalStats& g);
double mean_test(const SubgroupStats& s, const GlobalStats& g);
double t_score(const SubgroupStats& s, const GlobalStats& g);
double q_med(const SubgroupStats& s, const GlobalStats& g, double a);

struct Score {
  double value = 0.0;
  bool degenerate = false;  // t-score of a zero-dispersion subgroup
};

Score score(const MeasureSpec& m, const SubgroupStats& s, const GlobalStats& g);

/// Upper bound on the measure over every non-empty subset of `s`.
double optimistic_estimate(const MeasureSpec& m, const Extent& s, const std::vector<double>& target,
                           const GlobalStats& g);

/// Fraction of positives in s; target must be 0/1.
double precision(const Extent& s, const std::vector<double>& target);

}  // namespace wld
