#pragma once

// Uncoded cache placements as unions of half-open intervals (a, b] in (0, 1].
// Endpoints and measures are exact rationals.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cachecast/error.hpp"
#include "cachecast/rational.hpp"
#include "cachecast/subsets.hpp"

namespace cachecast {

inline constexpr int max_tuple_users = 16;

struct interval {
  rational lo;  // exclusive
  rational hi;  // inclusive

  rational length() const { return hi - lo; }
  friend bool operator==(const interval&, const interval&) = default;
};

namespace detail {

// Sorts and merges touching or overlapping intervals; drops empty ones.
inline std::vector<interval> normalize(std::vector<interval> parts) {
  std::erase_if(parts, [](const interval& i) { return !(i.lo < i.hi); });
  std::sort(parts.begin(), parts.end(),
            [](const interval& a, const interval& b) { return a.lo < b.lo; });
  std::vector<interval> merged;
  for (auto& part : parts) {
    if (!merged.empty() && part.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, part.hi);
    else
      merged.push_back(std::move(part));
  }
  return merged;
}

inline rational total_length(const std::vector<interval>& disjoint) {
  rational sum = 0;
  for (const auto& part : disjoint) sum += part.length();
  return sum;
}

}  // namespace detail

class caching_strategy {
 public:
  caching_strategy() = default;

  // Validates that every user's intervals lie in (0, 1], are pairwise disjoint and
  // add up to exactly mu.
  caching_strategy(std::vector<std::vector<interval>> per_user, rational mu) : mu_(std::move(mu)) {
    if (per_user.empty()) throw error(errc::out_of_range, "caching strategy needs at least one user");
    if (mu_ < 0 || mu_ > 1) throw error(errc::mu_out_of_range, "mu must lie in [0,1]");
    for (std::size_t k = 0; k < per_user.size(); ++k) {
      auto parts = per_user[k];
      std::erase_if(parts, [](const interval& i) { return i.lo == i.hi; });
      std::sort(parts.begin(), parts.end(),
                [](const interval& a, const interval& b) { return a.lo < b.lo; });
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].lo < 0 || parts[i].hi > 1 || parts[i].hi < parts[i].lo)
          throw error(errc::out_of_range,
                      "cache interval of user " + std::to_string(k + 1) + " is not inside (0,1]");
        if (i > 0 && parts[i].lo < parts[i - 1].hi)
          throw error(errc::out_of_range,
                      "cache intervals of user " + std::to_string(k + 1) + " overlap");
      }
      if (detail::total_length(parts) != mu_)
        throw error(errc::out_of_range, "cache of user " + std::to_string(k + 1) +
                                            " has measure " +
                                            format_rational(detail::total_length(parts)) +
                                            ", expected " + format_rational(mu_));
      caches_.push_back(std::move(parts));
    }
  }

  int num_users() const { return static_cast<int>(caches_.size()); }
  const rational& mu() const { return mu_; }
  const std::vector<interval>& cache(int user) const { return caches_[user]; }

 private:
  std::vector<std::vector<interval>> caches_;
  rational mu_;
};

// Central placement: with t = floor(mu K) and lambda = {mu K}, user k stores the
// scaled subset intervals (1 - lambda) J_S for |S| = t, S containing k, and the
// shifted intervals (1 - lambda) + lambda J_T for |T| = t + 1, T containing k.
// J_S = (r/C, (r+1)/C] where r is the zero-based lexicographic rank of S.
inline caching_strategy central_strategy(int num_users, const rational& mu) {
  if (num_users < 1 || num_users > 31) throw error(errc::out_of_range, "unsupported number of users");
  if (mu < 0 || mu > 1) throw error(errc::mu_out_of_range, "mu must lie in [0,1]");
  const rational load = mu * num_users;
  const int t = static_cast<int>(floor_of(load));
  const rational lambda = load - t;

  std::vector<std::vector<interval>> caches(num_users);
  auto place = [&](int size, const rational& offset, const rational& scale) {
    if (scale == 0) return;
    const auto family = subsets_of_size(num_users, size);
    const rational count = static_cast<long long>(family.size());
    for (std::size_t rank = 0; rank < family.size(); ++rank) {
      const rational lo = offset + scale * rational(static_cast<long long>(rank)) / count;
      const rational hi = offset + scale * rational(static_cast<long long>(rank + 1)) / count;
      for (int k : family[rank].members()) caches[k].push_back({lo, hi});
    }
  };
  place(t, rational(0), 1 - lambda);
  if (t + 1 <= num_users) place(t + 1, 1 - lambda, lambda);

  for (auto& parts : caches) parts = detail::normalize(std::move(parts));
  return caching_strategy(std::move(caches), mu);
}

// |union of the caches of users in q|, by endpoint sort and sweep.
inline rational coverage_measure(const caching_strategy& strategy, user_set q) {
  std::vector<interval> parts;
  for (int k : q.members()) {
    if (k >= strategy.num_users()) throw error(errc::out_of_range, "user outside the strategy");
    const auto& cache = strategy.cache(k);
    parts.insert(parts.end(), cache.begin(), cache.end());
  }
  return detail::total_length(detail::normalize(std::move(parts)));
}

// |intersection of the caches of users in q|.
inline rational intersection_measure(const caching_strategy& strategy, user_set q) {
  if (q.empty()) throw error(errc::empty_subset, "intersection over an empty set of users");
  const auto users = q.members();
  for (int k : users)
    if (k >= strategy.num_users()) throw error(errc::out_of_range, "user outside the strategy");
  std::vector<interval> common = strategy.cache(users.front());
  for (std::size_t i = 1; i < users.size(); ++i) {
    const auto& other = strategy.cache(users[i]);
    std::vector<interval> next;
    std::size_t a = 0, b = 0;
    while (a < common.size() && b < other.size()) {
      rational lo = std::max(common[a].lo, other[b].lo);
      rational hi = std::min(common[a].hi, other[b].hi);
      if (lo < hi) next.push_back({lo, hi});
      if (common[a].hi < other[b].hi)
        ++a;
      else
        ++b;
    }
    common = std::move(next);
  }
  return detail::total_length(common);
}

namespace detail {

inline rational binomial_ratio(int n, int k, int total, int size) {
  const std::uint64_t den = binomial(total, size);
  if (den == 0) return 0;
  return rational(static_cast<long long>(binomial(n, k)), static_cast<long long>(den));
}

}  // namespace detail

// Closed form of coverage_measure for the central placement, |q| users out of K.
inline rational central_union_measure(int num_users, const rational& mu, int q) {
  const rational load = mu * num_users;
  const int t = static_cast<int>(floor_of(load));
  const rational lambda = load - t;
  rational first = 1 - detail::binomial_ratio(num_users - q, t, num_users, t);
  rational second = 0;
  if (lambda != 0) second = 1 - detail::binomial_ratio(num_users - q, t + 1, num_users, t + 1);
  return (1 - lambda) * first + lambda * second;
}

// Closed form of intersection_measure for the central placement.
inline rational central_intersection_measure(int num_users, const rational& mu, int q) {
  const rational load = mu * num_users;
  const int t = static_cast<int>(floor_of(load));
  const rational lambda = load - t;
  rational first = detail::binomial_ratio(num_users - q, t - q, num_users, t);
  rational second = 0;
  if (lambda != 0) second = detail::binomial_ratio(num_users - q, t + 1 - q, num_users, t + 1);
  return (1 - lambda) * first + lambda * second;
}

// mu_S = |c_S| for every subset S, indexed by bitmask.
class caching_tuple {
 public:
  caching_tuple() = default;
  caching_tuple(int num_users, std::vector<rational> measures)
      : num_users_(num_users), measures_(std::move(measures)) {}

  int num_users() const { return num_users_; }
  const rational& operator[](user_set s) const { return measures_.at(s.mask()); }
  double value(user_set s) const { return to_double((*this)[s]); }
  const std::vector<rational>& measures() const { return measures_; }

 private:
  int num_users_ = 0;
  std::vector<rational> measures_;
};

// Splits (0, 1] into elementary pieces labelled by the set of users caching them,
// accumulates the uncovered-by-T measure for every T with a subset-sum transform,
// and reads mu_S = 1 - |pieces cached only inside the complement of S|.
inline caching_tuple make_caching_tuple(const caching_strategy& strategy) {
  const int users = strategy.num_users();
  if (users > max_tuple_users)
    throw error(errc::too_many_users, "caching tuple is limited to " +
                                          std::to_string(max_tuple_users) + " users");
  std::vector<rational> points{rational(0), rational(1)};
  for (int k = 0; k < users; ++k)
    for (const auto& part : strategy.cache(k)) {
      points.push_back(part.lo);
      points.push_back(part.hi);
    }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const std::size_t subsets = std::size_t{1} << users;
  std::vector<rational> inside(subsets, rational(0));
  std::vector<std::size_t> cursor(users, 0);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const rational& lo = points[i];
    const rational& hi = points[i + 1];
    std::uint32_t mask = 0;
    for (int k = 0; k < users; ++k) {
      const auto& cache = strategy.cache(k);
      auto& c = cursor[k];
      while (c < cache.size() && cache[c].hi <= lo) ++c;
      if (c < cache.size() && cache[c].lo <= lo && hi <= cache[c].hi) mask |= 1u << k;
    }
    inside[mask] += hi - lo;
  }
  // inside[T] becomes the measure of pieces whose holders all lie in T.
  for (int k = 0; k < users; ++k)
    for (std::size_t mask = 0; mask < subsets; ++mask)
      if (mask & (std::size_t{1} << k)) inside[mask] += inside[mask ^ (std::size_t{1} << k)];

  std::vector<rational> measures(subsets);
  const std::size_t full = subsets - 1;
  for (std::size_t mask = 0; mask < subsets; ++mask) measures[mask] = 1 - inside[full ^ mask];
  return caching_tuple(users, std::move(measures));
}

}  // namespace cachecast
