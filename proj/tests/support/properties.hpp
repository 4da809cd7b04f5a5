#pragma once

// Random instance generators and invariant checks shared by the unit tests and
// the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cachecast/caching.hpp"
#include "cachecast/channel.hpp"
#include "cachecast/degraded.hpp"
#include "cachecast/lp.hpp"
#include "cachecast/lp_scheme.hpp"
#include "cachecast/two_user.hpp"
#include "cachecast/upper_bound.hpp"

namespace cachecast::props {

// Nonincreasing row in [0,1]; with probability `one_prob` it starts with a run of ones.
inline ccdf_row random_row(std::mt19937_64& rng, int levels, double one_prob = 0.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ccdf_row row(levels);
  for (auto& v : row) v = unit(rng);
  std::sort(row.begin(), row.end(), std::greater<>());
  if (unit(rng) < one_prob) {
    const int ones = std::uniform_int_distribution<int>(1, levels)(rng);
    for (int l = 0; l < ones; ++l) row[l] = 1.0;
  }
  return row;
}

inline channel_stats random_stats(std::mt19937_64& rng, int users, int levels, double one_prob = 0.0) {
  std::vector<ccdf_row> rows;
  for (int k = 0; k < users; ++k) rows.push_back(random_row(rng, levels, one_prob));
  return validate_stats(std::move(rows));
}

// Levelwise nested rows, then shuffled so the weakest user is not always user 1.
inline channel_stats random_degraded_stats(std::mt19937_64& rng, int users, int levels) {
  std::vector<ccdf_row> rows{random_row(rng, levels)};
  for (int k = 1; k < users; ++k) {
    auto next = random_row(rng, levels);
    for (int l = 0; l < levels; ++l) next[l] = std::max(next[l], rows.back()[l]);
    rows.push_back(std::move(next));
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  return validate_stats(std::move(rows));
}

// Failed enhancement invariants for positive nonincreasing weights; empty if all hold.
inline std::vector<std::string> enhancement_violations(const channel_stats& stats, const std::vector<double>& omega,
                                                       double tol = 1e-12) {
  std::vector<std::string> failures;
  const auto enhanced = enhance(stats, omega).stats;
  const int users = stats.num_users(), levels = stats.num_levels();
  auto fail = [&](const std::string& what, int l) {
    failures.push_back(what + " at level " + std::to_string(l));
  };
  for (int k = 1; k < users; ++k)
    if (!is_stochastically_dominant(enhanced.row(k), enhanced.row(k - 1))) fail("enhanced chain not degraded", 0);
  for (int l = 1; l <= levels; ++l) {
    std::vector<double> w(users), w_orig(users);
    for (int k = 0; k < users; ++k) {
      w[k] = omega[k] * enhanced.ccdf(k, l);
      w_orig[k] = omega[k] * stats.ccdf(k, l);
      if (enhanced.ccdf(k, l) < stats.ccdf(k, l) - tol) fail("enhanced channel weaker than original", l);
    }
    // A perfect level stays perfect for every stronger user.
    for (int k = 0; k < users; ++k)
      if (enhanced.ccdf(k, l) >= 1.0 - tol)
        for (int u = k; u < users; ++u)
          if (enhanced.ccdf(u, l) < 1.0 - tol) fail("perfect level lost", l);
    // A rising weighted value is left as is, values before a rise never fall and
    // values after a drop never rise.
    for (int k = 1; k < users; ++k) {
      if (w[k] > w[k - 1] + tol) {
        if (std::abs(w_orig[k] - w[k]) > tol) fail("rising weighted value was enhanced", l);
        for (int j = 1; j < k; ++j)
          if (w[j] < w[j - 1] - tol) fail("prefix before a rise is not nondecreasing", l);
      }
      if (w[k] < w[k - 1] - tol)
        for (int j = k + 1; j < users; ++j)
          if (w[j] > w[j - 1] + tol) fail("suffix after a drop is not nonincreasing", l);
    }
    // The weighted envelope is unchanged.
    const double top = *std::max_element(w.begin(), w.end());
    const double top_orig = *std::max_element(w_orig.begin(), w_orig.end());
    if (std::abs(top - top_orig) > tol * std::max(1.0, top)) fail("weighted maximum changed", l);
    // Shape: rise, flat block of maximizers, strict drop, then nonincreasing.
    int first = -1, last = -1;
    for (int k = 0; k < users; ++k)
      if (w[k] >= top - tol) {
        if (first < 0) first = k;
        last = k;
      }
    for (int k = 1; k < first; ++k)
      if (w[k] < w[k - 1] - tol) fail("weighted values before the maximizers decrease", l);
    for (int k = first; k <= last; ++k)
      if (std::abs(w[k] - top) > tol) fail("maximizing block is not flat", l);
    if (std::abs(w_orig[first] - top) > tol) fail("first maximizer was enhanced", l);
    if (last + 1 < users && !(w[last + 1] < top - tol)) fail("no strict drop after the maximizers", l);
    for (int k = last + 2; k < users; ++k)
      if (w[k] > w[k - 1] + tol) fail("weighted values after the maximizers increase", l);
  }
  return failures;
}

// Positive nonincreasing weights with occasional ties.
inline std::vector<double> random_sorted_weights(std::mt19937_64& rng, int users) {
  std::uniform_real_distribution<double> unit(0.05, 3.0);
  std::vector<double> w(users);
  for (auto& v : w) v = unit(rng);
  std::sort(w.begin(), w.end(), std::greater<>());
  for (int k = 1; k < users; ++k)
    if (std::uniform_int_distribution<int>(0, 4)(rng) == 0) w[k] = w[k - 1];
  return w;
}

struct two_user_outcome {
  double exact = 0.0;
  double achieved = 0.0;
  bool order_ok = true;      // u* <= v*
  bool threshold_ok = true;  // ratio conditions at u* and v*
  bool shares_ok = true;     // the concrete split meets all four demands
};

inline two_user_outcome check_two_user(const channel_stats& stats, const rational& mu) {
  two_user_outcome out;
  out.exact = optimal_rate_two_user(stats, mu);
  const auto a = achievable_allocation_two_user(stats, mu);
  out.achieved = a.rate;
  out.order_ok = a.u <= a.v;
  // At mu = 0 the two maximizations coincide and the threshold claim has no content.
  if (mu > 0 && !a.order.empty()) {
    if (a.f1 <= a.f2 && !(a.ratio_at_u() <= 1.0 + 1e-12)) out.threshold_ok = false;
    if (a.f1 >= a.f2 && !(a.ratio_at_v() >= 1.0 - 1e-12)) out.threshold_ok = false;
  }
  for (double m : a.margins)
    if (m < -1e-9) out.shares_ok = false;
  return out;
}

// Random LP with a known feasible point and a bounding row.
inline lp_problem random_bounded_lp(std::mt19937_64& rng, int vars, int rows, bool with_equality) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0), unit(0.0, 1.0);
  std::vector<double> x0(vars);
  for (auto& v : x0) v = unit(rng);
  lp_problem p;
  p.c.resize(vars);
  for (auto& v : p.c) v = coef(rng);
  auto add_row = [&](bool equality) {
    std::vector<double> a(vars);
    double lhs = 0;
    for (int j = 0; j < vars; ++j) {
      a[j] = coef(rng);
      lhs += a[j] * x0[j];
    }
    if (equality) {
      p.a_eq.push_back(a);
      p.b_eq.push_back(lhs);
    } else {
      p.a_ub.push_back(a);
      p.b_ub.push_back(lhs + unit(rng));
    }
  };
  for (int r = 0; r < rows - 1 - (with_equality ? 1 : 0); ++r) add_row(false);
  if (with_equality) add_row(true);
  p.a_ub.push_back(std::vector<double>(vars, 1.0));
  p.b_ub.push_back(vars + 1.0);
  return p;
}

struct degraded_outcome {
  double lp_rate = 0.0;
  double degraded_rate = 0.0;
  double upper = 0.0;
  bool y_feasible = true;
};

inline degraded_outcome check_degraded(const channel_stats& stats, const rational& mu) {
  degraded_outcome out;
  const auto d = degraded_optimal_rate(stats, mu);
  out.degraded_rate = d.rate;
  out.lp_rate = achievable_rate_lp(stats, mu).rate;
  out.upper = upper_bound_rate(stats, make_caching_tuple(central_strategy(stats.num_users(), mu))).value;
  out.y_feasible = check_allocation(z_to_y(d), stats, d.rate).feasible;
  return out;
}

}  // namespace cachecast::props
