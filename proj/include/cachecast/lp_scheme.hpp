#pragma once

// Achievable rate with coded multicast messages: every subset S of t+1 users
// gets a share y[l][S] of each level, and message S must be decodable by each
// of its members at rate f / C(K, t).

#include <string>
#include <vector>

#include "cachecast/channel.hpp"
#include "cachecast/error.hpp"
#include "cachecast/lp.hpp"
#include "cachecast/rational.hpp"
#include "cachecast/subsets.hpp"

namespace cachecast {

inline constexpr double allocation_tolerance = 1e-9;

struct delivery_allocation {
  int num_users = 0;
  int num_levels = 0;
  int t = 0;
  double rate = 0.0;
  std::vector<user_set> subsets;      // all (t+1)-subsets, lexicographic
  std::vector<std::vector<double>> y;  // y[level - 1][subset index]

  std::size_t subset_index(user_set s) const {
    for (std::size_t i = 0; i < subsets.size(); ++i)
      if (subsets[i] == s) return i;
    throw error(errc::out_of_range, "subset " + s.label() + " is not a message of this allocation");
  }
};

inline delivery_allocation empty_allocation(int users, int levels, int t) {
  delivery_allocation out;
  out.num_users = users;
  out.num_levels = levels;
  out.t = t;
  out.subsets = subsets_of_size(users, t + 1);
  out.y.assign(levels, std::vector<double>(out.subsets.size(), 0.0));
  return out;
}

struct delivery_lp {
  int t = 0;
  std::vector<user_set> subsets;
  lp_problem problem;  // x = [y (level-major), f]; minimizes -f
  std::vector<std::vector<double>> g;
  std::vector<std::vector<double>> h;
  std::vector<std::string> g_labels;       // "(k,T)"
  std::vector<std::string> column_labels;  // "(l,S)" and "f"
};

inline void require_t(int users, int t) {
  if (t < 0 || t >= users)
    throw error(errc::bad_t, "t = " + std::to_string(t) + " must lie in [0, " +
                                 std::to_string(users - 1) + "]");
}

inline delivery_lp build_delivery_lp(const channel_stats& stats, int t) {
  const int users = stats.num_users(), levels = stats.num_levels();
  require_t(users, t);
  delivery_lp out;
  out.t = t;
  out.subsets = subsets_of_size(users, t + 1);
  const int messages = static_cast<int>(out.subsets.size());
  const int n = levels * messages + 1;
  const double share = 1.0 / static_cast<double>(binomial(users, t));

  for (int l = 1; l <= levels; ++l)
    for (const auto& s : out.subsets) out.column_labels.push_back("(" + std::to_string(l) + "," + s.label() + ")");
  out.column_labels.push_back("f");

  for (int s = 0; s < messages; ++s)
    for (int k : out.subsets[s].members()) {
      std::vector<double> row(n, 0.0);
      for (int l = 0; l < levels; ++l) row[l * messages + s] = -stats.ccdf(k, l + 1);
      row[n - 1] = share;
      out.g.push_back(std::move(row));
      out.g_labels.push_back("(" + std::to_string(k + 1) + "," + out.subsets[s].without(k).label() + ")");
    }
  for (int l = 0; l < levels; ++l) {
    std::vector<double> row(n, 0.0);
    for (int s = 0; s < messages; ++s) row[l * messages + s] = 1.0;
    out.h.push_back(std::move(row));
  }

  auto& p = out.problem;
  p.c.assign(n, 0.0);
  p.c[n - 1] = -1.0;
  p.column_labels = out.column_labels;
  for (const auto& row : out.g) {
    p.a_ub.push_back(row);
    p.b_ub.push_back(0.0);
  }
  for (const auto& row : out.h) {
    p.a_ub.push_back(row);
    p.b_ub.push_back(1.0);
  }
  return out;
}

// t = K mu, which must be an integer.
inline int integer_t(int users, const rational& mu) {
  if (mu < 0 || mu > 1) throw error(errc::mu_out_of_range, "mu must lie in [0,1]");
  const rational load = mu * users;
  if (!is_integer(load))
    throw error(errc::non_integer_t, "K mu = " + format_rational(load) + " is not an integer");
  const int t = static_cast<int>(floor_of(load));
  if (t == users) throw error(errc::unbounded_rate, "every file is fully cached (mu = 1)");
  return t;
}

inline delivery_allocation achievable_rate_lp(const channel_stats& stats, const rational& mu) {
  const int t = integer_t(stats.num_users(), mu);
  const auto lp = build_delivery_lp(stats, t);
  const auto solution = solve_lp(lp.problem);
  if (solution.status != lp_status::optimal)
    throw error(errc::numerical_failure, std::string("delivery LP ended as ") + to_string(solution.status));
  auto out = empty_allocation(stats.num_users(), stats.num_levels(), t);
  const std::size_t messages = out.subsets.size();
  for (int l = 0; l < stats.num_levels(); ++l)
    for (std::size_t s = 0; s < messages; ++s) out.y[l][s] = solution.x[l * messages + s];
  out.rate = solution.x.back();
  return out;
}

struct decoding_margin {
  int user = 0;  // zero-based
  user_set subset;
  double received = 0.0;  // sum over levels of F_k(l) y[l][S]
  double margin = 0.0;    // received - f / C(K, t)
};

struct allocation_check {
  std::vector<decoding_margin> margins;  // subsets lexicographic, then members ascending
  std::vector<double> level_slack;       // 1 - sum_S y[l][S]
  bool feasible = true;
  double min_margin = 0.0;

  const decoding_margin& at(int user, user_set s) const {
    for (const auto& m : margins)
      if (m.user == user && m.subset == s) return m;
    throw error(errc::out_of_range, "no margin for user " + std::to_string(user + 1) + " on " + s.label());
  }
};

inline allocation_check check_allocation(const delivery_allocation& alloc, const channel_stats& stats,
                                         double rate) {
  if (alloc.num_users != stats.num_users() || alloc.num_levels != stats.num_levels())
    throw error(errc::length_mismatch, "allocation does not match the channel dimensions");
  allocation_check out;
  const double need = rate / static_cast<double>(binomial(alloc.num_users, alloc.t));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < alloc.subsets.size(); ++s)
    for (int k : alloc.subsets[s].members()) {
      decoding_margin m;
      m.user = k;
      m.subset = alloc.subsets[s];
      for (int l = 0; l < alloc.num_levels; ++l) m.received += stats.ccdf(k, l + 1) * alloc.y[l][s];
      m.margin = m.received - need;
      worst = std::min(worst, m.margin);
      out.margins.push_back(m);
    }
  for (int l = 0; l < alloc.num_levels; ++l) {
    double used = 0.0;
    for (double v : alloc.y[l]) {
      if (v < -allocation_tolerance) out.feasible = false;
      used += v;
    }
    out.level_slack.push_back(1.0 - used);
    worst = std::min(worst, 1.0 - used);
  }
  out.min_margin = std::isfinite(worst) ? worst : 0.0;
  if (out.min_margin < -allocation_tolerance) out.feasible = false;
  return out;
}

}  // namespace cachecast
