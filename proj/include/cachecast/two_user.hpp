#pragma once

// Exact optimal source rate of the two-user channel with central caching, and
// the level/time split that attains it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cachecast/channel.hpp"
#include "cachecast/error.hpp"
#include "cachecast/rational.hpp"

namespace cachecast {

struct rate_pair {
  double r1 = 0.0;
  double r2 = 0.0;
};

inline void require_two_users(const channel_stats& stats) {
  if (stats.num_users() != 2)
    throw error(errc::not_two_user, "expected 2 users, got " + std::to_string(stats.num_users()));
}

// R1 sums F1 over levels with omega F1 >= F2, R2 sums F2 over the rest.
inline rate_pair rate_regions(const channel_stats& stats, double omega) {
  require_two_users(stats);
  rate_pair out;
  for (int l = 1; l <= stats.num_levels(); ++l) {
    const double f1 = stats.ccdf(0, l), f2 = stats.ccdf(1, l);
    if (omega * f1 >= f2)
      out.r1 += f1;
    else
      out.r2 += f2;
  }
  return out;
}

namespace detail {

inline void require_mu(const rational& mu) {
  if (mu < 0 || mu > 1) throw error(errc::mu_out_of_range, "mu must lie in [0,1]");
}

}  // namespace detail

// Minimizes (omega R1 + R2) / (omega (1-mu) + (1-2mu)) over omega >= 1 and
// (omega R1 + R2) / (omega (1-2mu) + (1-mu)) over 0 < omega <= 1. Between two
// consecutive ratios F2/F1 both are ratios of affine functions of omega, so
// the infimum is reached at a ratio, at omega = 1, or in one of the two limits.
inline double optimal_rate_two_user(const channel_stats& stats, const rational& mu_exact) {
  require_two_users(stats);
  detail::require_mu(mu_exact);
  if (mu_exact == 1) return std::numeric_limits<double>::infinity();
  const double mu = to_double(mu_exact);
  const double total1 = stats.total(0), total2 = stats.total(1);
  double best = std::min(total1, total2) / (1.0 - mu);
  if (mu_exact * 2 >= 1) return best;

  std::vector<double> candidates{1.0};
  for (int l = 1; l <= stats.num_levels(); ++l) {
    const double f1 = stats.ccdf(0, l), f2 = stats.ccdf(1, l);
    if (f1 > 0.0) candidates.push_back(f2 / f1);
  }
  for (double omega : candidates) {
    if (!(omega > 0.0)) continue;
    const auto r = rate_regions(stats, omega);
    const double num = omega * r.r1 + r.r2;
    if (omega >= 1.0) best = std::min(best, num / (omega * (1.0 - mu) + (1.0 - 2.0 * mu)));
    if (omega <= 1.0) best = std::min(best, num / (omega * (1.0 - 2.0 * mu) + (1.0 - mu)));
  }
  return best;
}

struct level_share {
  double individual1 = 0.0;
  double individual2 = 0.0;
  double common = 0.0;
};

struct two_user_allocation {
  // Active levels (one-based) sorted by g = F2/F1, and their ratios.
  std::vector<int> order;
  std::vector<double> gamma;
  // One-based positions into `order`; 0 when no level is active.
  int u = 0;
  double alpha = 0.0;
  int v = 0;
  double beta = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double rate = 0.0;
  double individual_size = 0.0;  // (1 - 2 mu) f
  double common_size = 0.0;      // mu f
  // Time fractions per original level, indexed by level - 1.
  std::vector<level_share> shares;
  // Received symbols minus requirement for: individual 1, individual 2,
  // common at user 1, common at user 2.
  double margins[4] = {0, 0, 0, 0};

  double ratio_at_u() const { return u > 0 ? gamma[u - 1] : 0.0; }
  double ratio_at_v() const { return v > 0 ? gamma[v - 1] : 0.0; }
};

inline two_user_allocation achievable_allocation_two_user(const channel_stats& stats,
                                                          const rational& mu_exact) {
  require_two_users(stats);
  detail::require_mu(mu_exact);
  if (mu_exact * 2 > 1)
    throw error(errc::mu_out_of_range, "the split construction needs mu <= 1/2");
  const double mu = to_double(mu_exact);
  const double c_ind = mu_exact * 2 == 1 ? 0.0 : 1.0 - 2.0 * mu;  // exact zero at mu = 1/2
  const double c_all = 1.0 - mu;
  const double inf = std::numeric_limits<double>::infinity();

  two_user_allocation out;
  const int levels = stats.num_levels();
  for (int l = 1; l <= levels; ++l)
    if (stats.ccdf(0, l) > 0.0 || stats.ccdf(1, l) > 0.0) out.order.push_back(l);
  auto ratio = [&](int l) {
    const double f1 = stats.ccdf(0, l), f2 = stats.ccdf(1, l);
    return f1 > 0.0 ? f2 / f1 : inf;
  };
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int x, int y) { return ratio(x) < ratio(y); });
  const int n = static_cast<int>(out.order.size());
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = stats.ccdf(0, out.order[i]);
    b[i] = stats.ccdf(1, out.order[i]);
    out.gamma.push_back(ratio(out.order[i]));
  }
  // prefix_a[i] = sum a[0..i-1], suffix_b[i] = sum b[i..n-1].
  std::vector<double> prefix_a(n + 1, 0.0), suffix_b(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix_a[i + 1] = prefix_a[i] + a[i];
  for (int i = n - 1; i >= 0; --i) suffix_b[i] = suffix_b[i + 1] + b[i];

  auto scaled = [&](double amount, double coefficient) {
    if (coefficient > 0.0) return amount / coefficient;
    return inf;
  };
  auto f1_at = [&](int u, double alpha) {
    return std::min(scaled(prefix_a[u] + alpha * a[u], c_ind),
                    scaled(suffix_b[u + 1] + (1.0 - alpha) * b[u], c_all));
  };
  auto f2_at = [&](int v, double beta) {
    return std::min(scaled(prefix_a[v] + (1.0 - beta) * a[v], c_all),
                    scaled(suffix_b[v + 1] + beta * b[v], c_ind));
  };
  auto clip = [](double x) { return std::clamp(x, 0.0, 1.0); };

  double best1 = -1.0, best2 = -1.0;
  for (int u = 0; u < n; ++u) {
    std::vector<double> alphas{0.0, 1.0};
    const double den = c_all * a[u] + c_ind * b[u];
    if (den > 0.0) alphas.push_back(clip((c_ind * suffix_b[u] - c_all * prefix_a[u]) / den));
    for (double alpha : alphas) {
      const double value = f1_at(u, alpha);
      if (value > best1 + 1e-12) {
        best1 = value;
        out.u = u + 1;
        out.alpha = alpha;
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    std::vector<double> betas{0.0, 1.0};
    const double den = c_ind * a[v] + c_all * b[v];
    if (den > 0.0) betas.push_back(clip((c_ind * prefix_a[v + 1] - c_all * suffix_b[v + 1]) / den));
    for (double beta : betas) {
      const double value = f2_at(v, beta);
      if (value > best2 + 1e-12) {
        best2 = value;
        out.v = v + 1;
        out.beta = beta;
      }
    }
  }
  out.f1 = std::max(best1, 0.0);
  out.f2 = std::max(best2, 0.0);
  out.rate = std::min(out.f1, out.f2);
  out.individual_size = c_ind * out.rate;
  out.common_size = mu * out.rate;

  // Place user 1's individual message on the lowest-ratio prefix [0, s1] and
  // user 2's on the highest-ratio suffix [s2, n] of the sorted level axis, each
  // just long enough; the common message takes what lies in between.
  auto reach_from_bottom = [&](double need) {
    if (need <= 0.0) return 0.0;
    for (int i = 0; i < n; ++i) {
      if (prefix_a[i + 1] >= need) return a[i] > 0.0 ? i + (need - prefix_a[i]) / a[i] : double(i);
    }
    return double(n);
  };
  auto reach_from_top = [&](double need) {
    if (need <= 0.0) return double(n);
    for (int i = n - 1; i >= 0; --i) {
      if (suffix_b[i] >= need) return b[i] > 0.0 ? i + 1 - (need - suffix_b[i + 1]) / b[i] : double(i + 1);
    }
    return 0.0;
  };
  const double s1 = std::clamp(reach_from_bottom(out.individual_size), 0.0, double(n));
  const double s2 = std::clamp(std::max(reach_from_top(out.individual_size), s1), 0.0, double(n));
  out.shares.assign(levels, level_share{});
  double got1 = 0, got2 = 0, common1 = 0, common2 = 0;
  for (int i = 0; i < n; ++i) {
    level_share share;
    share.individual1 = std::clamp(s1 - i, 0.0, 1.0);
    share.individual2 = std::clamp(i + 1 - s2, 0.0, 1.0);
    share.common = std::max(0.0, 1.0 - share.individual1 - share.individual2);
    out.shares[out.order[i] - 1] = share;
    got1 += a[i] * share.individual1;
    got2 += b[i] * share.individual2;
    common1 += a[i] * share.common;
    common2 += b[i] * share.common;
  }
  out.margins[0] = got1 - out.individual_size;
  out.margins[1] = got2 - out.individual_size;
  out.margins[2] = common1 - out.common_size;
  out.margins[3] = common2 - out.common_size;
  return out;
}

}  // namespace cachecast
