#include "wld/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "wld/errors.hpp"
#include "wld/text.hpp"

namespace wld {

namespace {

// Lemire's bounded draw, so results do not depend on the standard library's
// distribution implementations.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  double u1 = unit(rng);
  double u2 = unit(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

std::string token_name(std::size_t table, std::size_t col) {
  static const char* clauses[] = {"WHERE", "SELECT", "ORDERBY", "GROUPBY", "JOIN"};
  return std::string(clauses[col % 5]) + "_t" + std::to_string(table + 1) + ".c" + std::to_string(col + 1);
}

SynthOutput synthesize(const SynthConfig& c) {
  if (c.n == 0 || c.tables == 0 || c.cols == 0) throw ConfigError("synth needs n, tables and cols of at least 1");
  if (!(c.sparsity >= 0.0 && c.sparsity < 1.0)) throw ConfigError("sparsity must be in [0,1)");
  if (!(c.noise_sd >= 0.0)) throw ConfigError("noise must be non-negative");
  const std::size_t m = c.tables * c.cols;
  if (c.planted_column >= m) throw ConfigError("planted column out of range");
  const std::uint64_t cells = static_cast<std::uint64_t>(c.n) * m;
  const auto nnz = static_cast<std::uint64_t>(std::llround((1.0 - c.sparsity) * static_cast<double>(cells)));
  if (nnz == 0) throw ConfigError("sparsity leaves no nonzero cell");

  std::mt19937_64 rng(c.seed);

  // Floyd's sampling of nnz distinct cells, then column-major order
  std::vector<std::uint64_t> chosen;
  if (nnz == cells) {
    chosen.resize(cells);
    for (std::uint64_t i = 0; i < cells; ++i) chosen[i] = i;
  } else {
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(nnz * 2);
    for (std::uint64_t j = cells - nnz; j < cells; ++j) {
      std::uint64_t t = below(rng, j + 1);
      if (!taken.insert(t).second) {
        taken.insert(j);
        t = j;
      }
      chosen.push_back(t);
    }
    std::sort(chosen.begin(), chosen.end());
  }

  std::vector<Attribute> attrs;
  std::vector<ColumnData> cols;
  std::vector<SparseColumn> sparse(m);
  for (std::uint64_t cell : chosen) {
    const std::size_t col = cell / c.n;
    const auto row = static_cast<std::uint32_t>(cell % c.n);
    const std::uint64_t r = below(rng, 10);
    sparse[col].rows.push_back(row);
    sparse[col].values.push_back(r < 7 ? 1.0 : (r < 9 ? 2.0 : 3.0));
  }
  for (std::size_t t = 0; t < c.tables; ++t) {
    for (std::size_t k = 0; k < c.cols; ++k) attrs.push_back({token_name(t, k), AttributeKind::Numeric, {}, Provenance::QueryToken});
  }
  for (auto& s : sparse) cols.emplace_back(std::move(s));

  // planted membership
  std::vector<bool> planted(c.n, false);
  const auto& pc = std::get<SparseColumn>(cols[c.planted_column]);
  for (auto r : pc.rows) planted[r] = true;

  CodeColumn server;
  DenseColumn nrows, time;
  for (std::size_t i = 0; i < c.n; ++i) {
    server.codes.push_back(static_cast<std::int32_t>(below(rng, 4)));
    nrows.values.push_back(static_cast<double>(1 + below(rng, 1000)));
    double v = c.base_time + c.noise_sd * gaussian(rng);
    if (c.target_model == TargetModel::Planted && planted[i]) v += c.delta;
    // rounded to the millisecond, never negative
    time.values.push_back(std::max(0.0, std::round(v * 1000.0) / 1000.0));
  }
  attrs.push_back({"serverName", AttributeKind::Nominal, {"S1", "S2", "S3", "S4"}, Provenance::Env});
  cols.emplace_back(std::move(server));
  attrs.push_back({"nrows", AttributeKind::Numeric, {}, Provenance::Meta});
  cols.emplace_back(std::move(nrows));
  attrs.push_back({"time", AttributeKind::Numeric, {}, Provenance::Meta});
  cols.emplace_back(std::move(time));

  std::vector<std::string> ids;
  ids.reserve(c.n);
  for (std::size_t i = 0; i < c.n; ++i) ids.push_back("q" + std::to_string(i + 1));

  SynthOutput out;
  out.planted_support = static_cast<std::size_t>(std::count(planted.begin(), planted.end(), true));
  if (c.target_model == TargetModel::Planted) {
    out.planted_token = attrs[c.planted_column].name;
    out.planted_selector = out.planted_token + " > 0";
  }
  out.data = Dataset(std::move(ids), std::move(attrs), std::move(cols));
  return out;
}

}  // namespace wld
