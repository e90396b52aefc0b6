#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wld {

/// Object set over a fixed universe 0..n-1, one bit per object.
class Extent {
 public:
  Extent() = default;
  explicit Extent(std::size_t n, bool full = false);

  std::size_t universe() const { return n_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  Extent& operator&=(const Extent& other);
  Extent& operator|=(const Extent& other);
  friend Extent operator&(Extent a, const Extent& b) { return a &= b; }
  bool operator==(const Extent& other) const = default;

  /// |a ∩ b| and |a ∪ b| without materializing.
  static std::size_t intersection_count(const Extent& a, const Extent& b);
  static std::size_t union_count(const Extent& a, const Extent& b);
  /// Writes a ∩ b into out (resized as needed) and returns its count.
  static std::size_t intersect_into(const Extent& a, const Extent& b, Extent& out);

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        f(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace wld
