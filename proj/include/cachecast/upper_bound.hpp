#pragma once

// Upper bound on the source rate of the K-user channel for a given caching
// tuple: the weighted max-envelope ratio minimized over weights, solved as one
// small LP per ordering of the weights.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "cachecast/caching.hpp"
#include "cachecast/channel.hpp"
#include "cachecast/error.hpp"
#include "cachecast/lp.hpp"
#include "cachecast/parallel.hpp"
#include "cachecast/subsets.hpp"

namespace cachecast {

inline constexpr int max_upper_bound_users = 8;

using permutation = std::vector<int>;  // zero-based users, strongest weight first

namespace detail {

inline void require_matching(const channel_stats& stats, const caching_tuple& tuple) {
  if (stats.num_users() != tuple.num_users())
    throw error(errc::length_mismatch, "channel has " + std::to_string(stats.num_users()) +
                                           " users but the caching tuple has " +
                                           std::to_string(tuple.num_users()));
}

inline void require_permutation(const permutation& pi, int users) {
  std::vector<int> sorted = pi;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(users);
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted != expected) throw error(errc::out_of_range, "not a permutation of the users");
}

// mu of the first k users of pi, k = 1..K (index k-1).
inline std::vector<rational> prefix_measures(const caching_tuple& tuple, const permutation& pi) {
  std::vector<rational> out;
  user_set prefix;
  for (int user : pi) {
    prefix = prefix.with(user);
    out.push_back(tuple[prefix]);
  }
  return out;
}

}  // namespace detail

// Ratio for a fixed ordering pi of the weights (the caller vouches that omega
// is nonincreasing along pi).
inline double objective_for_permutation(const channel_stats& stats, const caching_tuple& tuple,
                                        const std::vector<double>& omega, const permutation& pi) {
  detail::require_matching(stats, tuple);
  detail::require_permutation(pi, stats.num_users());
  if (omega.size() != pi.size()) throw error(errc::length_mismatch, "one weight per user is required");
  const auto prefix = detail::prefix_measures(tuple, pi);
  double numerator = 0.0;
  for (int l = 1; l <= stats.num_levels(); ++l) {
    double envelope = 0.0;
    for (int k = 0; k < stats.num_users(); ++k) envelope = std::max(envelope, omega[k] * stats.ccdf(k, l));
    numerator += envelope;
  }
  double denominator = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) denominator += omega[pi[k]] * to_double(1 - prefix[k]);
  if (!(denominator > 0.0)) throw error(errc::zero_denominator, "weighted residual demand is zero");
  return numerator / denominator;
}

inline double objective_at(const channel_stats& stats, const caching_tuple& tuple,
                           const std::vector<double>& omega) {
  if (static_cast<int>(omega.size()) != stats.num_users())
    throw error(errc::length_mismatch, "one weight per user is required");
  for (double w : omega)
    if (!(w >= 0.0) || !std::isfinite(w)) throw error(errc::out_of_range, "weights must be nonnegative");
  permutation pi(omega.size());
  std::iota(pi.begin(), pi.end(), 0);
  std::stable_sort(pi.begin(), pi.end(), [&](int a, int b) { return omega[a] > omega[b]; });
  return objective_for_permutation(stats, tuple, omega, pi);
}

struct permutation_lp {
  permutation pi;
  std::vector<rational> residual;  // 1 - mu of the first k users of pi
  lp_problem problem;              // x = [sigma_1..sigma_K, theta_1..theta_B]
};

inline permutation_lp build_permutation_lp(const channel_stats& stats, const caching_tuple& tuple,
                                           const permutation& pi) {
  detail::require_matching(stats, tuple);
  detail::require_permutation(pi, stats.num_users());
  const int users = stats.num_users(), levels = stats.num_levels();
  const int n = users + levels;
  permutation_lp out;
  out.pi = pi;
  for (const auto& m : detail::prefix_measures(tuple, pi)) out.residual.push_back(1 - m);

  auto& p = out.problem;
  p.c.assign(n, 0.0);
  for (int l = 0; l < levels; ++l) p.c[users + l] = 1.0;
  for (int k = 0; k < users; ++k) p.column_labels.push_back("sigma" + std::to_string(k + 1));
  for (int l = 0; l < levels; ++l) p.column_labels.push_back("theta" + std::to_string(l + 1));

  // sigma_k F_{pi(k)}(l) - (1 - mu_{pi([k])}) theta_l <= 0
  for (int k = 0; k < users; ++k)
    for (int l = 0; l < levels; ++l) {
      std::vector<double> row(n, 0.0);
      row[k] = stats.ccdf(pi[k], l + 1);
      row[users + l] = -to_double(out.residual[k]);
      p.a_ub.push_back(std::move(row));
      p.b_ub.push_back(0.0);
    }
  // sigma_k / (1 - mu_[k]) <= sigma_{k-1} / (1 - mu_[k-1]), cleared of denominators.
  for (int k = 1; k < users; ++k) {
    std::vector<double> row(n, 0.0);
    row[k - 1] = -to_double(out.residual[k]);
    row[k] = to_double(out.residual[k - 1]);
    p.a_ub.push_back(std::move(row));
    p.b_ub.push_back(0.0);
  }
  std::vector<double> normalization(n, 0.0);
  std::fill(normalization.begin(), normalization.begin() + users, 1.0);
  p.a_eq.push_back(std::move(normalization));
  p.b_eq.push_back(1.0);
  for (int k = 0; k < users; ++k)
    if (out.residual[k] == 0) {
      std::vector<double> row(n, 0.0);
      row[k] = 1.0;
      p.a_eq.push_back(std::move(row));
      p.b_eq.push_back(0.0);
    }
  return out;
}

struct permutation_value {
  permutation pi;
  double value = std::numeric_limits<double>::infinity();  // +inf when the LP is infeasible
  lp_status status = lp_status::infeasible;
};

struct upper_bound_report {
  double value = std::numeric_limits<double>::infinity();
  permutation argmin;
  std::vector<permutation_value> table;  // lexicographic order of pi
  std::vector<double> omega_star;        // smallest positive entry scaled to 1
  bool omega_non_unique = false;
};

// Weights of the user ordering pi read back from an LP point.
inline std::vector<double> weights_from_sigma(const permutation_lp& lp, const std::vector<double>& x) {
  const int users = static_cast<int>(lp.pi.size());
  std::vector<double> omega(users, 0.0);
  for (int k = 0; k < users; ++k)
    if (lp.residual[k] != 0) omega[lp.pi[k]] = x[k] / to_double(lp.residual[k]);
  double smallest = std::numeric_limits<double>::infinity();
  for (double w : omega)
    if (w > 1e-12) smallest = std::min(smallest, w);
  if (std::isfinite(smallest))
    for (double& w : omega) w = w > 1e-12 ? w / smallest : 0.0;
  return omega;
}

inline upper_bound_report upper_bound_rate(const channel_stats& stats, const caching_tuple& tuple) {
  detail::require_matching(stats, tuple);
  const int users = stats.num_users();
  if (users > max_upper_bound_users)
    throw error(errc::too_many_users, "the permutation sweep is limited to " +
                                          std::to_string(max_upper_bound_users) + " users");
  std::vector<permutation> all;
  permutation pi(users);
  std::iota(pi.begin(), pi.end(), 0);
  do all.push_back(pi);
  while (std::next_permutation(pi.begin(), pi.end()));

  upper_bound_report report;
  report.table.resize(all.size());
  std::vector<lp_solution> solutions(all.size());
  parallel_for(all.size(), [&](std::size_t i) {
    const auto lp = build_permutation_lp(stats, tuple, all[i]);
    solutions[i] = solve_lp(lp.problem);
    auto& row = report.table[i];
    row.pi = all[i];
    row.status = solutions[i].status;
    if (row.status == lp_status::optimal) row.value = solutions[i].value;
  });

  std::size_t best = all.size();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (report.table[i].status == lp_status::numerical_failure)
      throw error(errc::numerical_failure, "LP solve failed for one ordering of the weights");
    if (report.table[i].status != lp_status::optimal) continue;
    if (best == all.size() || report.table[i].value < report.table[best].value) best = i;
  }
  if (best == all.size()) return report;
  report.value = report.table[best].value;
  report.argmin = all[best];
  const auto lp = build_permutation_lp(stats, tuple, all[best]);
  report.omega_star = weights_from_sigma(lp, solutions[best].x);
  report.omega_non_unique = solutions[best].alternative_optima;
  return report;
}

}  // namespace cachecast
