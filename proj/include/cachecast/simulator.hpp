#pragma once

// Monte-Carlo check of a delivery allocation. Each level's n channel uses are cut
// into contiguous spans, one per message plus an idle span; user k collects the
// symbols of level l at every use t where L_k[t] >= l. A message counts as decoded
// once the collected symbols reach its length n f / C(K, t).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "cachecast/channel.hpp"
#include "cachecast/error.hpp"
#include "cachecast/lp_scheme.hpp"
#include "cachecast/subsets.hpp"

namespace cachecast {

struct ccdf_estimate {
  std::size_t n = 0;
  std::vector<std::vector<double>> estimate;   // [user][level - 1]
  std::vector<std::vector<double>> std_error;  // sqrt(F(1-F)/n)
};

inline ccdf_estimate empirical_ccdf(const state_realization& states) {
  const std::size_t n = states.num_uses();
  if (n == 0) throw error(errc::out_of_range, "empty realization");
  ccdf_estimate out;
  out.n = n;
  for (const auto& row : states.levels) {
    std::vector<std::size_t> at_least(states.num_levels + 2, 0);
    for (int v : row) ++at_least[v];
    for (int l = states.num_levels - 1; l >= 0; --l) at_least[l] += at_least[l + 1];
    std::vector<double> est, se;
    for (int l = 1; l <= states.num_levels; ++l) {
      const double p = static_cast<double>(at_least[l]) / static_cast<double>(n);
      est.push_back(p);
      se.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
    }
    out.estimate.push_back(std::move(est));
    out.std_error.push_back(std::move(se));
  }
  return out;
}

// Splits n into parts proportional to `shares` (which sum to 1): floors first,
// then the leftover units go to the largest remainders, ties to the lower index.
inline std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& shares) {
  std::vector<std::size_t> counts(shares.size(), 0);
  std::vector<double> remainder(shares.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double quota = std::max(0.0, shares[i]) * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += counts[i];
  }
  while (assigned > n) {
    // Only reachable through rounding of shares that sum to slightly above 1.
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> idx(shares.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % idx.size(), ++assigned) ++counts[idx[i]];
  return counts;
}

struct message_delivery {
  int user = 0;
  user_set subset;
  std::size_t span_total = 0;  // channel uses given to the message, summed over levels
  std::size_t delivered = 0;
  std::size_t required = 0;
  double empirical_margin = 0.0;  // delivered / n - f / C(K, t)
  double analytic_margin = 0.0;
  double sigma = 0.0;  // standard error of delivered / n
  bool decodable = false;
};

struct simulation_report {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int t = 0;
  double rate = 0.0;
  std::vector<message_delivery> messages;  // subsets lexicographic, then members ascending
  std::vector<bool> user_decodable;
  ccdf_estimate ccdf;
  state_realization states;
  // spans[level - 1][message] = [begin, end) in channel uses
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> spans;
};

inline simulation_report simulate_delivery(const channel_stats& stats, const delivery_allocation& alloc,
                                           double rate, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw error(errc::out_of_range, "at least one channel use is required");
  const auto analytic = check_allocation(alloc, stats, rate);
  if (!analytic.feasible)
    throw error(errc::infeasible_allocation,
                "allocation violates a level budget or decoding condition by " +
                    std::to_string(-analytic.min_margin));

  simulation_report out;
  out.n = n;
  out.seed = seed;
  out.t = alloc.t;
  out.rate = rate;
  out.states = sample_states(stats, n, seed);
  out.ccdf = empirical_ccdf(out.states);

  const std::size_t messages = alloc.subsets.size();
  for (int l = 0; l < alloc.num_levels; ++l) {
    std::vector<double> shares = alloc.y[l];
    double used = 0.0;
    for (double& v : shares) {
      v = std::max(0.0, v);
      used += v;
    }
    shares.push_back(std::max(0.0, 1.0 - used));
    const auto counts = apportion(n, shares);
    std::vector<std::pair<std::size_t, std::size_t>> level_spans;
    std::size_t start = 0;
    for (std::size_t s = 0; s < messages; ++s) {
      level_spans.emplace_back(start, start + counts[s]);
      start += counts[s];
    }
    out.spans.push_back(std::move(level_spans));
  }

  const double per_message = rate / static_cast<double>(binomial(alloc.num_users, alloc.t));
  const auto required = static_cast<std::size_t>(
      std::max(0.0, std::ceil(static_cast<double>(n) * per_message - 1e-9)));
  out.user_decodable.assign(alloc.num_users, true);
  std::size_t check_index = 0;
  for (std::size_t s = 0; s < messages; ++s)
    for (int k : alloc.subsets[s].members()) {
      message_delivery m;
      m.user = k;
      m.subset = alloc.subsets[s];
      m.required = required;
      const auto& received = out.states.levels[k];
      for (int l = 0; l < alloc.num_levels; ++l) {
        const auto [begin, end] = out.spans[l][s];
        m.span_total += end - begin;
        for (std::size_t t = begin; t < end; ++t)
          if (received[t] >= l + 1) ++m.delivered;
      }
      // Uses are independent, so the count's variance is a sum over uses. Within
      // one use the active levels are nested events: P[L >= a, L >= b] = F(max).
      // Uses sharing the same active level set are grouped between span edges.
      const auto& est = out.ccdf.estimate[k];
      std::vector<std::size_t> cuts{0, n};
      for (int l = 0; l < alloc.num_levels; ++l) {
        cuts.push_back(out.spans[l][s].first);
        cuts.push_back(out.spans[l][s].second);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      double variance = 0.0;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const std::size_t begin = cuts[c], end = cuts[c + 1];
        std::vector<int> active;
        for (int l = 0; l < alloc.num_levels; ++l)
          if (out.spans[l][s].first <= begin && end <= out.spans[l][s].second) active.push_back(l);
        double mean = 0.0, second = 0.0;
        for (int a : active) {
          mean += est[a];
          for (int b : active) second += est[std::max(a, b)];
        }
        variance += static_cast<double>(end - begin) * std::max(0.0, second - mean * mean);
      }
      m.sigma = std::sqrt(variance) / static_cast<double>(n);
      m.empirical_margin = static_cast<double>(m.delivered) / static_cast<double>(n) - per_message;
      m.analytic_margin = analytic.margins[check_index++].margin;
      m.decodable = m.delivered >= m.required;
      if (!m.decodable) out.user_decodable[k] = false;
      out.messages.push_back(m);
    }
  return out;
}

// One row per user, one column per channel use.
inline void write_trace(std::ostream& os, const state_realization& states) {
  for (int k = 0; k < states.num_users(); ++k) {
    os << "user" << k + 1;
    for (int v : states.levels[k]) os << ',' << v;
    os << '\n';
  }
}

}  // namespace cachecast
