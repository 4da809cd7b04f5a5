#pragma once

// Statistics of the K-user deterministic time-varying broadcast channel.
//
// At channel use t, user k receives the top L_k[t] of the B transmitted signal
// levels. L_k is i.i.d. over time with CCDF ccdf[k][l-1] = P[L_k >= l].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cachecast/error.hpp"

namespace cachecast {

inline constexpr double probability_tolerance = 1e-12;

using ccdf_row = std::vector<double>;

class channel_stats {
 public:
  channel_stats() = default;

  int num_users() const { return static_cast<int>(ccdf_.size()); }
  int num_levels() const { return ccdf_.empty() ? 0 : static_cast<int>(ccdf_.front().size()); }

  // P[L_k >= level] for zero-based user and one-based level in [1, B].
  double ccdf(int user, int level) const { return ccdf_[user][level - 1]; }
  const ccdf_row& row(int user) const { return ccdf_[user]; }
  const std::vector<ccdf_row>& rows() const { return ccdf_; }

  double total(int user) const {
    double sum = 0.0;
    for (double p : ccdf_[user]) sum += p;
    return sum;
  }

  friend channel_stats validate_stats(std::vector<ccdf_row> raw);

 private:
  std::vector<ccdf_row> ccdf_;
};

inline channel_stats validate_stats(std::vector<ccdf_row> raw) {
  if (raw.empty()) throw error(errc::out_of_range, "at least one user is required");
  const std::size_t levels = raw.front().size();
  if (levels == 0) throw error(errc::out_of_range, "at least one signal level is required");
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const auto& row = raw[k];
    if (row.size() != levels)
      throw error(errc::length_mismatch, "user " + std::to_string(k + 1) + " has " +
                                             std::to_string(row.size()) + " levels, expected " +
                                             std::to_string(levels));
    for (std::size_t l = 0; l < levels; ++l) {
      if (!std::isfinite(row[l]) || row[l] < -probability_tolerance ||
          row[l] > 1.0 + probability_tolerance)
        throw error(errc::out_of_range, "ccdf of user " + std::to_string(k + 1) + " at level " +
                                            std::to_string(l + 1) + " is outside [0,1]");
      if (l > 0 && row[l] > row[l - 1] + probability_tolerance)
        throw error(errc::not_monotone, "ccdf of user " + std::to_string(k + 1) +
                                            " increases at level " + std::to_string(l + 1));
    }
  }
  channel_stats stats;
  stats.ccdf_ = std::move(raw);
  return stats;
}

// PMF over {0, ..., B}; F(0) = 1 and F(B+1) = 0 close the telescoping sum.
inline std::vector<double> pmf_from_ccdf(const channel_stats& stats, int user) {
  const auto& row = stats.row(user);
  const int levels = stats.num_levels();
  std::vector<double> pmf(levels + 1);
  pmf[0] = 1.0 - row[0];
  for (int l = 1; l < levels; ++l) pmf[l] = row[l - 1] - row[l];
  pmf[levels] = row[levels - 1];
  return pmf;
}

// a >=st b: a(l) >= b(l) at every level, ties allowed.
inline bool is_stochastically_dominant(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw error(errc::length_mismatch, "ccdf sequences have different lengths");
  for (std::size_t l = 0; l < a.size(); ++l)
    if (a[l] < b[l] - probability_tolerance) return false;
  return true;
}

struct enhanced_channel {
  channel_stats stats;
  // Users whose weight is zero; they are left out of the recursion unchanged.
  std::vector<int> zero_weight_users;
};

// Replaces each user's channel by a stronger one so that the positive-weight
// users form a degraded chain. Users are taken in the given order, which must
// carry nonincreasing weights.
inline enhanced_channel enhance(const channel_stats& stats, std::span<const double> weights) {
  const int users = stats.num_users();
  if (static_cast<int>(weights.size()) != users)
    throw error(errc::length_mismatch, "one weight per user is required");
  for (int k = 0; k < users; ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]))
      throw error(errc::out_of_range, "weights must be finite and nonnegative");
    if (k > 0 && weights[k] > weights[k - 1])
      throw error(errc::weights_unsorted, "weights must be sorted nonincreasing");
  }

  std::vector<ccdf_row> out = stats.rows();
  enhanced_channel result;
  for (int k = 1; k < users; ++k) {
    if (weights[k] == 0.0) {
      result.zero_weight_users.push_back(k);
      continue;
    }
    const double ratio = weights[k - 1] / weights[k];
    for (int l = 0; l < stats.num_levels(); ++l)
      out[k][l] = std::min(1.0, std::max(stats.row(k)[l], ratio * out[k - 1][l]));
  }
  if (users > 0 && weights[0] == 0.0) result.zero_weight_users.insert(result.zero_weight_users.begin(), 0);
  result.stats = validate_stats(std::move(out));
  return result;
}

// SplitMix64 step; used to derive one independent generator seed per user.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Generator for user k: std::mt19937_64 seeded with the (k+1)-th SplitMix64
// output of `seed`. Uniforms use the top 53 bits, so streams are identical on
// every conforming platform.
inline std::mt19937_64 user_stream(std::uint64_t seed, int user) {
  std::uint64_t state = seed;
  std::uint64_t derived = 0;
  for (int i = 0; i <= user; ++i) derived = splitmix64(state);
  return std::mt19937_64(derived);
}

inline double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

struct state_realization {
  int num_levels = 0;
  std::uint64_t seed = 0;
  // levels[k][t] = L_k[t] in {0, ..., B}.
  std::vector<std::vector<int>> levels;

  int num_users() const { return static_cast<int>(levels.size()); }
  std::size_t num_uses() const { return levels.empty() ? 0 : levels.front().size(); }
};

inline state_realization sample_states(const channel_stats& stats, std::size_t uses,
                                       std::uint64_t seed) {
  if (uses == 0) throw error(errc::out_of_range, "at least one channel use is required");
  state_realization out;
  out.num_levels = stats.num_levels();
  out.seed = seed;
  out.levels.resize(stats.num_users());
  for (int k = 0; k < stats.num_users(); ++k) {
    auto engine = user_stream(seed, k);
    const auto& row = stats.row(k);
    auto& states = out.levels[k];
    states.resize(uses);
    for (auto& state : states) {
      // L = #{l : u < F(l)}, so P[L >= l] = F(l) because F is nonincreasing.
      const double u = unit_uniform(engine);
      int level = 0;
      while (level < out.num_levels && u < row[level]) ++level;
      state = level;
    }
  }
  return out;
}

}  // namespace cachecast
