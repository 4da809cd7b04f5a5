#pragma once

// Optimal source rate of a degraded channel under central caching with integer
// t = K mu, and the coded-message allocation derived from its level split z.

#include <algorithm>
#include <numeric>
#include <vector>

#include "cachecast/caching.hpp"
#include "cachecast/channel.hpp"
#include "cachecast/error.hpp"
#include "cachecast/lp.hpp"
#include "cachecast/lp_scheme.hpp"
#include "cachecast/rational.hpp"
#include "cachecast/subsets.hpp"

namespace cachecast {

struct degraded_result {
  double rate = 0.0;
  int t = 0;
  // order[r] is the zero-based user holding rank r + 1, weakest first.
  std::vector<int> order;
  // 1 - mu of the r + 1 weakest users.
  std::vector<rational> residual;
  // z[level - 1][rank]
  std::vector<std::vector<double>> z;
};

// Weakest-first ordering by total CCDF mass, checked to be a dominance chain.
inline std::vector<int> degraded_order(const channel_stats& stats) {
  std::vector<int> order(stats.num_users());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return stats.total(a) < stats.total(b); });
  for (std::size_t r = 1; r < order.size(); ++r)
    if (!is_stochastically_dominant(stats.row(order[r]), stats.row(order[r - 1])))
      throw error(errc::not_degraded, "users " + std::to_string(order[r - 1] + 1) + " and " +
                                          std::to_string(order[r] + 1) + " are not ordered levelwise");
  return order;
}

inline lp_problem build_degraded_lp(const channel_stats& stats, const std::vector<int>& order,
                                    const std::vector<rational>& residual) {
  const int users = stats.num_users(), levels = stats.num_levels();
  const int n = levels * users + 1;
  lp_problem p;
  p.c.assign(n, 0.0);
  p.c[n - 1] = -1.0;
  for (int l = 1; l <= levels; ++l)
    for (int r = 1; r <= users; ++r) p.column_labels.push_back("z" + std::to_string(l) + "," + std::to_string(r));
  p.column_labels.push_back("f");
  for (int r = 0; r < users; ++r) {
    std::vector<double> row(n, 0.0);
    for (int l = 0; l < levels; ++l) row[l * users + r] = -stats.ccdf(order[r], l + 1);
    row[n - 1] = to_double(residual[r]);
    p.a_ub.push_back(std::move(row));
    p.b_ub.push_back(0.0);
  }
  for (int l = 0; l < levels; ++l) {
    std::vector<double> row(n, 0.0);
    for (int r = 0; r < users; ++r) row[l * users + r] = 1.0;
    p.a_ub.push_back(std::move(row));
    p.b_ub.push_back(1.0);
  }
  return p;
}

inline degraded_result degraded_optimal_rate(const channel_stats& stats, const rational& mu) {
  const int users = stats.num_users(), levels = stats.num_levels();
  if (mu < 0 || mu > 1) throw error(errc::mu_out_of_range, "mu must lie in [0,1]");
  const rational load = mu * users;
  if (!is_integer(load))
    throw error(errc::non_integer_t, "K mu = " + format_rational(load) + " is not an integer");
  degraded_result out;
  out.order = degraded_order(stats);
  out.t = static_cast<int>(floor_of(load));
  if (out.t == users) throw error(errc::unbounded_rate, "every file is fully cached (mu = 1)");
  for (int r = 1; r <= users; ++r) out.residual.push_back(1 - central_union_measure(users, mu, r));

  const auto problem = build_degraded_lp(stats, out.order, out.residual);
  const auto solution = solve_lp(problem);
  if (solution.status != lp_status::optimal)
    throw error(errc::numerical_failure, std::string("degraded LP ended as ") + to_string(solution.status));
  out.rate = solution.x.back();
  out.z.assign(levels, std::vector<double>(users, 0.0));
  for (int l = 0; l < levels; ++l)
    for (int r = 0; r < users; ++r) out.z[l][r] = solution.x[l * users + r];
  return out;
}

// y[l][S] = z[l][w] / C(K - w, t) with w the weakest rank in S (one-based).
// Ranks map to users through `order`; users above rank K - t lead no message
// and their z entries are not used.
inline delivery_allocation z_to_y(const std::vector<std::vector<double>>& z, int users, int t,
                                  const std::vector<int>& order) {
  require_t(users, t);
  if (static_cast<int>(order.size()) != users) throw error(errc::length_mismatch, "order needs one entry per user");
  for (const auto& level : z) {
    if (static_cast<int>(level.size()) != users) throw error(errc::length_mismatch, "z needs one entry per user");
    double used = 0.0;
    for (double v : level) {
      if (v < -allocation_tolerance) throw error(errc::infeasible_z, "z has a negative entry");
      used += v;
    }
    if (used > 1.0 + allocation_tolerance) throw error(errc::infeasible_z, "z overfills a level");
  }
  std::vector<int> rank_of(users);
  for (int r = 0; r < users; ++r) rank_of[order[r]] = r;

  auto out = empty_allocation(users, static_cast<int>(z.size()), t);
  for (std::size_t s = 0; s < out.subsets.size(); ++s) {
    int weakest = users;
    for (int k : out.subsets[s].members()) weakest = std::min(weakest, rank_of[k]);
    const double count = static_cast<double>(binomial(users - (weakest + 1), t));
    for (std::size_t l = 0; l < z.size(); ++l) out.y[l][s] = std::max(0.0, z[l][weakest]) / count;
  }
  return out;
}

inline delivery_allocation z_to_y(const degraded_result& result) {
  auto out = z_to_y(result.z, static_cast<int>(result.order.size()), result.t, result.order);
  out.rate = result.rate;
  return out;
}

}  // namespace cachecast
