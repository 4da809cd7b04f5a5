// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cachecast/cli.hpp"
#include "cachecast/report.hpp"
#include "cachecast/simulator.hpp"
#include "../tests/support/properties.hpp"

using namespace cachecast;

namespace {

struct verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

std::string scenario(const std::string& name) { return std::string(CACHECAST_SCENARIO_DIR) + "/" + name; }

json run_json(const std::vector<std::string>& args, verdict& v) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  v.require(code == 0, "command failed: " + err.str());
  if (code != 0) return json::object();
  return json::parse(out.str());
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

verdict example_one() {
  verdict v;
  auto j = run_json({"rates", "degraded", "--json", scenario("example1.json")}, v);
  if (!v.pass) return v;
  const double rate = j.at("rate").get<double>();
  v.require(std::abs(rate - 1.326) <= 0.005, "rate " + fixed(rate));
  v.require(std::abs(rate - 25.2 / 19) <= 1e-9, "rate differs from 25.2/19");
  // Reference split: ranks weakest first, levels 2 and 3 wholly to the weakest user.
  const auto stats = validate_stats({{0.5, 0.4, 0.3}, {0.7, 0.5, 0.4}, {0.9, 0.6, 0.5}});
  const std::vector<std::vector<double>> z{{7.0 / 19, 12.0 / 19, 0}, {1, 0, 0}, {1, 0, 0}};
  const std::vector<double> residual{2.0 / 3, 1.0 / 3, 0.0};
  for (int r = 0; r < 3; ++r) {
    double received = 0.0;
    for (int l = 0; l < 3; ++l) received += z[l][r] * stats.ccdf(r, l + 1);
    v.require(received >= residual[r] * rate - 1e-9, "reference z short for rank " + std::to_string(r + 1));
  }
  v.require(check_allocation(z_to_y(z, 3, 1, {0, 1, 2}), stats, rate - 1e-9).feasible, "reference z maps to infeasible y");
  v.notes.push_back("rate " + fixed(rate, 8));
  return v;
}

verdict example_two() {
  verdict v;
  auto a = run_json({"rates", "achievable", "--json", scenario("example2.json")}, v);
  auto u = run_json({"rates", "upper", "--table", "--json", scenario("example2.json")}, v);
  if (!v.pass) return v;
  const double f_lp = a.at("rate").get<double>();
  v.require(std::abs(f_lp - 1.5) <= 1e-9, "f_LP " + fixed(f_lp, 12));
  const auto& given = a.at("given_check");
  v.require(given.at("feasible").get<bool>(), "reference y is infeasible");
  for (const auto& m : given.at("margins")) {
    const int user = m.at("user").get<int>();
    const std::string subset = m.at("subset").get<std::string>();
    const double margin = m.at("margin").get<double>();
    if (user == 1 && subset == "{1,2}") v.require(std::abs(margin - 0.125) <= 1e-12, "margin user 1 " + fixed(margin));
    if (user == 2 && subset == "{1,2}") v.require(std::abs(margin) <= 1e-12, "margin user 2 " + fixed(margin));
  }
  const std::map<std::string, double> table_one{{"(1,2,3)", 1.64}, {"(1,3,2)", 1.73}, {"(2,1,3)", 1.62},
                                                {"(2,3,1)", 1.61}, {"(3,1,2)", 1.76}, {"(3,2,1)", 1.66}};
  for (const auto& row : u.at("table")) {
    std::string label = "(";
    for (const auto& k : row.at("pi")) label += (label.size() > 1 ? "," : "") + std::to_string(k.get<int>());
    label += ")";
    const double value = row.at("value").get<double>();
    v.require(std::abs(value - table_one.at(label)) <= 0.01, "pi " + label + " value " + fixed(value));
  }
  const double f_star = u.at("value").get<double>();
  v.require(std::abs(f_star - 1.61) <= 0.01, "minimum " + fixed(f_star));
  v.require(u.at("argmin_pi") == json::array({2, 3, 1}), "argmin " + u.at("argmin_pi").dump());
  const auto stats = validate_stats({{0.9, 0.3, 0.3}, {0.7, 0.4, 0.4}, {0.5, 0.5, 0.5}});
  const double at_omega = objective_at(stats, make_caching_tuple(central_strategy(3, rational(1, 3))), {0, 1.25, 1});
  v.require(std::abs(at_omega - 1.607) <= 0.001, "objective at (0,1.25,1) " + fixed(at_omega));
  v.require(f_lp < f_star, "no gap between f_LP and f*");
  v.notes.push_back("f_LP " + fixed(f_lp) + " < f* " + fixed(f_star));
  return v;
}

verdict two_user_matching() {
  verdict v;
  std::mt19937_64 rng(101);
  int instances = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto s = props::random_stats(rng, 2, 1 + trial % 6, 0.1);
    for (long long p = 0; p <= 10; ++p) {
      const auto o = props::check_two_user(s, rational(p, 20));
      const std::string where = "trial " + std::to_string(trial) + " mu " + std::to_string(p) + "/20";
      v.require(std::abs(o.achieved - o.exact) <= 1e-9, where + " gap " + fixed(std::abs(o.achieved - o.exact)));
      v.require(o.order_ok, where + " u* > v*");
      v.require(o.threshold_ok, where + " threshold condition");
      v.require(o.shares_ok, where + " split misses a demand");
      if (!v.pass) return v;
      ++instances;
    }
  }
  v.notes.push_back(std::to_string(instances) + " (instance, mu) pairs");
  return v;
}

verdict degraded_equality() {
  verdict v;
  std::mt19937_64 rng(103);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int users = 2 + trial % 3, levels = 1 + trial % 5;
    auto s = props::random_degraded_stats(rng, users, levels);
    for (int t = 0; t < users; ++t) {
      const auto o = props::check_degraded(s, rational(t, users));
      const std::string where = "trial " + std::to_string(trial) + " t " + std::to_string(t);
      v.require(std::abs(o.lp_rate - o.degraded_rate) <= 1e-6, where + " LP " + fixed(o.lp_rate, 12) + " vs " +
                                                                   fixed(o.degraded_rate, 12));
      v.require(o.degraded_rate <= o.upper + 1e-6, where + " above the upper bound");
      v.require(o.y_feasible, where + " mapped y infeasible");
      if (!v.pass) return v;
      ++checked;
    }
  }
  v.notes.push_back(std::to_string(checked) + " (instance, t) pairs");
  return v;
}

verdict enhancement() {
  verdict v;
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 1000; ++trial) {
    const int users = 2 + trial % 5, levels = 1 + trial % 6;
    auto s = props::random_stats(rng, users, levels, 0.3);
    auto failures = props::enhancement_violations(s, props::random_sorted_weights(rng, users), 1e-12);
    if (!failures.empty()) {
      v.require(false, "trial " + std::to_string(trial) + ": " + failures.front());
      return v;
    }
  }
  v.notes.push_back("1000 pairs");
  return v;
}

verdict lp_oracle() {
  verdict v;
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = props::random_bounded_lp(rng, 1 + trial % 5, 2 + trial % 7, trial % 3 == 0);
    const auto s = solve_lp(p);
    const auto o = enumerate_vertices(p);
    const std::string where = "LP " + std::to_string(trial);
    v.require(s.status == o.status, where + " status " + to_string(s.status) + " vs " + to_string(o.status));
    if (s.status == lp_status::optimal && o.status == lp_status::optimal)
      v.require(std::abs(s.value - o.value) <= 1e-9, where + " value gap " + fixed(std::abs(s.value - o.value)));
    if (!v.pass) return v;
  }
  const auto stats = validate_stats({{0.9, 0.3, 0.3}, {0.7, 0.4, 0.4}, {0.5, 0.5, 0.5}});
  const auto tuple = make_caching_tuple(central_strategy(3, rational(1, 3)));
  const double bound = upper_bound_rate(stats, tuple).value;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double grid_min = std::numeric_limits<double>::infinity();
  int samples = 0;
  while (samples < 10000) {
    std::vector<double> w(3);
    for (auto& x : w) x = unit(rng) < 0.2 ? 0.0 : unit(rng);
    if (w[0] == 0 && w[1] == 0 && w[2] == 0) continue;
    const double value = objective_at(stats, tuple, w);
    v.require(value >= bound - 1e-9, "omega beats the bound by " + fixed(bound - value));
    if (!v.pass) return v;
    grid_min = std::min(grid_min, value);
    ++samples;
  }
  v.require(grid_min - bound <= 0.02, "grid minimum " + fixed(grid_min) + " far from bound " + fixed(bound));
  v.notes.push_back("grid min - bound " + fixed(grid_min - bound, 3));
  return v;
}

// Allowance: at most one 3 sigma excursion per margin across the seeds, and the
// same per (user, level) CCDF estimate.
verdict simulation() {
  verdict v;
  auto cfg = load_config(scenario("example2.json"));
  const auto& alloc = *cfg.allocation;
  const std::size_t n = 100000;
  std::map<std::pair<int, std::string>, int> margin_excursions;
  std::map<std::pair<int, int>, int> ccdf_excursions;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = simulate_delivery(cfg.stats, alloc, alloc.rate, n, seed);
    for (const auto& m : r.messages) {
      // Rounding of span edges moves the expected count by at most one use per level.
      const double rounding = static_cast<double>(alloc.num_levels) / static_cast<double>(n);
      if (std::abs(m.empirical_margin - m.analytic_margin) > 3 * m.sigma + rounding)
        ++margin_excursions[{m.user, m.subset.label()}];
    }
    for (int k = 0; k < cfg.stats.num_users(); ++k)
      for (int l = 1; l <= cfg.stats.num_levels(); ++l) {
        const double p = cfg.stats.ccdf(k, l);
        if (std::abs(r.ccdf.estimate[k][l - 1] - p) > 3 * std::sqrt(p * (1 - p) / static_cast<double>(n)))
          ++ccdf_excursions[{k, l}];
      }
  }
  int total = 0;
  for (const auto& [key, count] : margin_excursions) {
    total += count;
    v.require(count <= 1, "user " + std::to_string(key.first + 1) + " message " + key.second + " left 3 sigma " +
                              std::to_string(count) + " times");
  }
  for (const auto& [key, count] : ccdf_excursions)
    v.require(count <= 1, "CCDF of user " + std::to_string(key.first + 1) + " level " + std::to_string(key.second) +
                              " left 3 sigma " + std::to_string(count) + " times");
  v.notes.push_back(std::to_string(total) + " margin excursions over 20 seeds");
  return v;
}

}  // namespace

int main() {
  struct criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<verdict()> body;
  };
  const std::vector<criterion> criteria{
      {1, "degraded example rate and reference split", 1.0, example_one},
      {2, "non-degraded example LP, allocation margins and ordering table", 2.0, example_two},
      {3, "two-user optimum matches the construction", 30.0, two_user_matching},
      {4, "degraded optimum equals the LP and respects the upper bound", 60.0, degraded_equality},
      {5, "enhancement invariants", 0.0, enhancement},
      {6, "LP solver oracle and upper-bound sandwich", 0.0, lp_oracle},
      {7, "simulation consistency", 30.0, simulation},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0) v.require(seconds < c.budget_s, "took " + fixed(seconds, 3) + " s");
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << fixed(seconds, 3)
              << " s)";
    for (const auto& note : v.notes) std::cout << "; " << note;
    std::cout << '\n';
  }
  return all ? 0 : 1;
}
