#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

namespace adaptmt {

inline constexpr int kMaxHypotheses = 16;

// A subset of hypothesis indices. Indices are 0-based internally; the text
// form ("{1,2,4}") is 1-based to match how trial hypotheses are numbered.
class IndexSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = int;
    using difference_type = std::ptrdiff_t;
    using pointer = const int*;
    using reference = int;

    constexpr iterator() = default;
    constexpr explicit iterator(std::uint32_t rest) : rest_(rest) {}
    constexpr int operator*() const { return std::countr_zero(rest_); }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    constexpr bool operator==(const iterator&) const = default;

   private:
    std::uint32_t rest_ = 0;
  };

  constexpr IndexSet() = default;
  constexpr explicit IndexSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr IndexSet full(int k) {
    return IndexSet(k >= 32 ? ~0u : ((1u << k) - 1u));
  }
  static constexpr IndexSet single(int j) { return IndexSet(1u << j); }
  static IndexSet of(std::initializer_list<int> members) {
    std::uint32_t b = 0;
    for (int j : members) b |= 1u << j;
    return IndexSet(b);
  }
  static IndexSet from_members(const std::vector<int>& members) {
    std::uint32_t b = 0;
    for (int j : members) b |= 1u << j;
    return IndexSet(b);
  }
  // 1-based convenience for tests and configs: of1({2,3,4}) == {1,2,3} 0-based.
  static IndexSet of1(std::initializer_list<int> members) {
    std::uint32_t b = 0;
    for (int j : members) b |= 1u << (j - 1);
    return IndexSet(b);
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(int j) const { return (bits_ >> j) & 1u; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int min() const { return std::countr_zero(bits_); }

  constexpr IndexSet with(int j) const { return IndexSet(bits_ | (1u << j)); }
  constexpr IndexSet without(int j) const { return IndexSet(bits_ & ~(1u << j)); }
  constexpr bool is_subset_of(IndexSet other) const { return (bits_ & ~other.bits_) == 0; }

  friend constexpr IndexSet operator&(IndexSet a, IndexSet b) { return IndexSet(a.bits_ & b.bits_); }
  friend constexpr IndexSet operator|(IndexSet a, IndexSet b) { return IndexSet(a.bits_ | b.bits_); }
  friend constexpr IndexSet operator-(IndexSet a, IndexSet b) { return IndexSet(a.bits_ & ~b.bits_); }

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::vector<int> members() const { return {begin(), end()}; }

  std::string to_string() const;
  // Parses "{1,2,4}", "1,2,4" or "1 2 4" (1-based). Throws ValidationError.
  static IndexSet parse(std::string_view text, int k);

  constexpr auto operator<=>(const IndexSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

// All non-empty subsets of `universe`, largest sets first and, within a size,
// in decreasing mask order (the ordering used by the printed closure tables).
std::vector<IndexSet> nonempty_subsets(IndexSet universe);

}  // namespace adaptmt
