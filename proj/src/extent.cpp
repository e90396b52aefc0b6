#include "wld/extent.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace wld {

Extent::Extent(std::size_t n, bool full) : n_(n), words_((n + 63) / 64, full ? ~std::uint64_t{0} : 0) {
  if (full && n % 64) words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
}

std::size_t Extent::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

Extent& Extent::operator&=(const Extent& other) {
  if (other.n_ != n_) throw std::invalid_argument("extents over different universes");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

Extent& Extent::operator|=(const Extent& other) {
  if (other.n_ != n_) throw std::invalid_argument("extents over different universes");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

std::size_t Extent::intersection_count(const Extent& a, const Extent& b) {
  std::size_t c = 0;
  const std::size_t m = std::min(a.words_.size(), b.words_.size());
  for (std::size_t w = 0; w < m; ++w) c += static_cast<std::size_t>(std::popcount(a.words_[w] & b.words_[w]));
  return c;
}

std::size_t Extent::union_count(const Extent& a, const Extent& b) {
  return a.count() + b.count() - intersection_count(a, b);
}

std::size_t Extent::intersect_into(const Extent& a, const Extent& b, Extent& out) {
  out.n_ = a.n_;
  out.words_.resize(a.words_.size());
  std::size_t c = 0;
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    out.words_[w] = a.words_[w] & b.words_[w];
    c += static_cast<std::size_t>(std::popcount(out.words_[w]));
  }
  return c;
}

std::vector<std::size_t> Extent::indices() const {
  std::vector<std::size_t> out;
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

}  // namespace wld
