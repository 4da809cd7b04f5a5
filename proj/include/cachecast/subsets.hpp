#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace cachecast {

// Binomial coefficient with C(n, k) = 0 outside 0 <= k <= n.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / i;
  return result;
}

// A set of users stored as a bitmask; bit i is user i+1.
class user_set {
 public:
  constexpr user_set() = default;
  constexpr explicit user_set(std::uint32_t mask) : mask_(mask) {}

  static user_set all(int num_users) {
    return user_set(num_users >= 32 ? ~0u : ((1u << num_users) - 1u));
  }

  static user_set of(std::initializer_list<int> zero_based) {
    user_set s;
    for (int u : zero_based) s = s.with(u);
    return s;
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool contains(int user) const { return (mask_ >> user) & 1u; }
  constexpr bool empty() const { return mask_ == 0; }
  int size() const { return std::popcount(mask_); }
  constexpr user_set with(int user) const { return user_set(mask_ | (1u << user)); }
  constexpr user_set without(int user) const { return user_set(mask_ & ~(1u << user)); }
  constexpr bool is_subset_of(user_set other) const { return (mask_ & ~other.mask_) == 0; }

  // Zero-based members in increasing order.
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  // "{1,2}" with one-based labels.
  std::string label() const {
    std::string out = "{";
    bool first = true;
    for (int u : members()) {
      if (!first) out += ",";
      out += std::to_string(u + 1);
      first = false;
    }
    return out + "}";
  }

  friend constexpr bool operator==(user_set a, user_set b) { return a.mask_ == b.mask_; }

 private:
  std::uint32_t mask_ = 0;
};

// All subsets of {0..n-1} with exactly k members, in lexicographic order of their
// sorted member lists ({1,2} < {1,3} < {2,3}).
inline std::vector<user_set> subsets_of_size(int n, int k) {
  std::vector<user_set> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    user_set s;
    for (int i : idx) s = s.with(i);
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace cachecast
