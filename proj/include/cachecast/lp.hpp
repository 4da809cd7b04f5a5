#pragma once

// Dense two-phase tableau simplex for
//   minimize c.x  subject to  A x <= b,  E x = e,  x >= 0
// with Bland's rule throughout, plus a vertex-enumeration oracle for tiny problems.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cachecast/error.hpp"

namespace cachecast {

inline constexpr double lp_feasibility_tolerance = 1e-9;
inline constexpr double lp_pivot_tolerance = 1e-11;

struct lp_problem {
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<std::string> column_labels;  // optional, diagnostics only

  int num_vars() const { return static_cast<int>(c.size()); }

  void check() const {
    const std::size_t n = c.size();
    if (a_ub.size() != b_ub.size() || a_eq.size() != b_eq.size())
      throw error(errc::length_mismatch, "lp row count differs from rhs length");
    auto finite = [](double v) { return std::isfinite(v); };
    for (const auto& rows : {&a_ub, &a_eq})
      for (const auto& row : *rows) {
        if (row.size() != n) throw error(errc::length_mismatch, "lp row has wrong number of columns");
        if (!std::all_of(row.begin(), row.end(), finite))
          throw error(errc::out_of_range, "lp matrix entry is not finite");
      }
    for (const auto* v : {&c, &b_ub, &b_eq})
      if (!std::all_of(v->begin(), v->end(), finite))
        throw error(errc::out_of_range, "lp vector entry is not finite");
  }
};

enum class lp_status { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(lp_status s) {
  switch (s) {
    case lp_status::optimal: return "optimal";
    case lp_status::infeasible: return "infeasible";
    case lp_status::unbounded: return "unbounded";
    case lp_status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct lp_solution {
  lp_status status = lp_status::infeasible;
  std::vector<double> x;
  double value = std::numeric_limits<double>::quiet_NaN();
  // Multipliers in the Lagrangian sense: c - A^T y_ub - E^T y_eq >= 0, y_ub <= 0.
  std::vector<double> y_ub;
  std::vector<double> y_eq;
  // Some nonbasic structural column has zero reduced cost at the optimum.
  bool alternative_optima = false;
  int iterations = 0;
};

namespace detail {

class tableau {
 public:
  // rows_ x cols_ constraint block plus rhs in the last column.
  tableau(int rows, int cols) : rows_(rows), cols_(cols), t_(rows, std::vector<double>(cols + 1, 0.0)) {}

  double& at(int r, int c) { return t_[r][c]; }
  double at(int r, int c) const { return t_[r][c]; }
  double& rhs(int r) { return t_[r][cols_]; }
  double rhs(int r) const { return t_[r][cols_]; }

  void pivot(int r, int c, std::vector<double>& cost, double& cost_rhs) {
    const double p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    t_[r][c] = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = t_[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) {
        t_[i][j] -= f * t_[r][j];
        if (std::abs(t_[i][j]) < 1e-15) t_[i][j] = 0.0;
      }
      t_[i][c] = 0.0;
    }
    const double f = cost[c];
    if (f != 0.0) {
      for (int j = 0; j < cols_; ++j) {
        cost[j] -= f * t_[r][j];
        if (std::abs(cost[j]) < 1e-15) cost[j] = 0.0;
      }
      cost_rhs -= f * t_[r][cols_];
      cost[c] = 0.0;
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_;
  int cols_;
  std::vector<std::vector<double>> t_;
};

enum class phase_result { optimal, unbounded, stalled, iteration_cap };

// Runs Bland-rule pivots until no admissible entering column remains. `cost`
// holds reduced costs; `cost_rhs` is minus the current objective value.
inline phase_result run_phase(tableau& tab, std::vector<int>& basis, std::vector<double>& cost,
                              double& cost_rhs, const std::vector<char>& allowed, int& iterations,
                              int cap) {
  while (true) {
    int enter = -1;
    for (int j = 0; j < tab.cols(); ++j)
      if (allowed[j] && cost[j] < -lp_feasibility_tolerance) {
        enter = j;
        break;
      }
    if (enter < 0) return phase_result::optimal;
    if (++iterations > cap) return phase_result::iteration_cap;

    int leave = -1;
    double best = 0.0;
    bool tiny_only = false;
    for (int i = 0; i < tab.rows(); ++i) {
      const double a = tab.at(i, enter);
      if (a <= lp_pivot_tolerance) {
        if (a > 1e-13) tiny_only = true;
        continue;
      }
      const double ratio = tab.rhs(i) / a;
      if (leave < 0 || ratio < best - 1e-12) {
        leave = i;
        best = ratio;
      } else if (ratio <= best + 1e-12 && basis[i] < basis[leave]) {
        leave = i;
        best = std::min(best, ratio);
      }
    }
    if (leave < 0) return tiny_only ? phase_result::stalled : phase_result::unbounded;
    tab.pivot(leave, enter, cost, cost_rhs);
    basis[leave] = enter;
  }
}

}  // namespace detail

inline lp_solution solve_lp(const lp_problem& problem) {
  problem.check();
  const int n = problem.num_vars();
  const int m_ub = static_cast<int>(problem.b_ub.size());
  const int m_eq = static_cast<int>(problem.b_eq.size());
  const int m = m_ub + m_eq;

  // Row i of the working system is sign[i] * (original row i); after flipping,
  // every rhs is nonnegative. Each <= row gets a slack (+1 or, if flipped, -1);
  // rows without a +1 slack get an artificial.
  std::vector<double> sign(m, 1.0);
  std::vector<int> unit_col(m, -1);
  int cols = n + m_ub;
  std::vector<int> artificial_row;
  for (int i = 0; i < m; ++i) {
    const double rhs = i < m_ub ? problem.b_ub[i] : problem.b_eq[i - m_ub];
    if (rhs < 0) sign[i] = -1.0;
    const bool needs_artificial = i >= m_ub || sign[i] < 0;
    if (needs_artificial) {
      unit_col[i] = cols++;
      artificial_row.push_back(i);
    } else {
      unit_col[i] = n + i;
    }
  }
  const int first_artificial = n + m_ub;

  detail::tableau tab(m, cols);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const auto& row = i < m_ub ? problem.a_ub[i] : problem.a_eq[i - m_ub];
    const double rhs = i < m_ub ? problem.b_ub[i] : problem.b_eq[i - m_ub];
    for (int j = 0; j < n; ++j) tab.at(i, j) = sign[i] * row[j];
    if (i < m_ub) tab.at(i, n + i) = sign[i];
    if (unit_col[i] >= first_artificial) tab.at(i, unit_col[i]) = 1.0;
    tab.rhs(i) = sign[i] * rhs;
    basis[i] = unit_col[i];
  }

  lp_solution out;
  const int cap = std::max(5000, 50 * (m + cols));

  // Phase 1: minimize the sum of artificials.
  std::vector<double> cost(cols, 0.0);
  double cost_rhs = 0.0;
  for (int i : artificial_row) {
    for (int j = 0; j < cols; ++j)
      if (j < first_artificial) cost[j] -= tab.at(i, j);
    cost_rhs -= tab.rhs(i);
  }
  std::vector<char> allowed(cols, 1);
  if (!artificial_row.empty()) {
    auto r = detail::run_phase(tab, basis, cost, cost_rhs, allowed, out.iterations, cap);
    if (r == detail::phase_result::iteration_cap || r == detail::phase_result::stalled) {
      out.status = lp_status::numerical_failure;
      return out;
    }
    if (-cost_rhs > lp_feasibility_tolerance) {
      out.status = lp_status::infeasible;
      return out;
    }
    // Drive zero-level artificials out of the basis where a structural pivot exists.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < first_artificial) continue;
      int best = -1;
      for (int j = 0; j < first_artificial; ++j)
        if (std::abs(tab.at(i, j)) > lp_pivot_tolerance &&
            (best < 0 || std::abs(tab.at(i, j)) > std::abs(tab.at(i, best))))
          best = j;
      if (best >= 0) {
        tab.pivot(i, best, cost, cost_rhs);
        basis[i] = best;
      }
    }
  }

  // Phase 2: the real objective, artificials barred from entering.
  std::fill(cost.begin(), cost.end(), 0.0);
  for (int j = 0; j < n; ++j) cost[j] = problem.c[j];
  cost_rhs = 0.0;
  for (int i = 0; i < m; ++i) {
    const double cb = basis[i] < n ? problem.c[basis[i]] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j < cols; ++j) cost[j] -= cb * tab.at(i, j);
    cost_rhs -= cb * tab.rhs(i);
  }
  for (int j = first_artificial; j < cols; ++j) allowed[j] = 0;
  auto r = detail::run_phase(tab, basis, cost, cost_rhs, allowed, out.iterations, cap);
  if (r == detail::phase_result::iteration_cap || r == detail::phase_result::stalled) {
    out.status = lp_status::numerical_failure;
    return out;
  }
  if (r == detail::phase_result::unbounded) {
    out.status = lp_status::unbounded;
    return out;
  }

  out.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) out.x[basis[i]] = std::max(0.0, tab.rhs(i));
  out.value = 0.0;
  for (int j = 0; j < n; ++j) out.value += problem.c[j] * out.x[j];

  out.y_ub.assign(m_ub, 0.0);
  out.y_eq.assign(m_eq, 0.0);
  for (int i = 0; i < m; ++i) {
    const double y = -cost[unit_col[i]] * sign[i];
    if (i < m_ub)
      out.y_ub[i] = y;
    else
      out.y_eq[i - m_ub] = y;
  }
  std::vector<char> is_basic(cols, 0);
  for (int b : basis) is_basic[b] = 1;
  for (int j = 0; j < first_artificial; ++j)
    if (!is_basic[j] && std::abs(cost[j]) <= lp_feasibility_tolerance) out.alternative_optima = true;

  // Guard against drift: an answer that violates its own constraints is not optimal.
  auto violated = [&](const std::vector<double>& row, double rhs, bool equality) {
    double lhs = 0.0, scale = std::abs(rhs);
    for (int j = 0; j < n; ++j) {
      lhs += row[j] * out.x[j];
      scale = std::max(scale, std::abs(row[j] * out.x[j]));
    }
    const double tol = lp_feasibility_tolerance * std::max(1.0, scale);
    return equality ? std::abs(lhs - rhs) > tol : lhs > rhs + tol;
  };
  for (int i = 0; i < m_ub; ++i)
    if (violated(problem.a_ub[i], problem.b_ub[i], false)) out.status = lp_status::numerical_failure;
  for (int i = 0; i < m_eq; ++i)
    if (violated(problem.a_eq[i], problem.b_eq[i], true)) out.status = lp_status::numerical_failure;
  if (out.status != lp_status::numerical_failure) out.status = lp_status::optimal;
  return out;
}

inline constexpr int max_enumeration_vars = 6;

// Brute force: every choice of num_vars constraints (rows, nonnegativity and a
// large box x <= box) taken as tight, solved and checked for feasibility.
// A best vertex that needs the box signals an unbounded problem.
inline lp_solution enumerate_vertices(const lp_problem& problem, double box = 1e6) {
  problem.check();
  const int n = problem.num_vars();
  if (n > max_enumeration_vars)
    throw error(errc::too_large, "vertex enumeration supports at most " +
                                     std::to_string(max_enumeration_vars) + " variables");
  struct row {
    std::vector<double> a;
    double b;
    bool equality;
    bool is_box;
  };
  std::vector<row> rows;
  for (std::size_t i = 0; i < problem.b_ub.size(); ++i) rows.push_back({problem.a_ub[i], problem.b_ub[i], false, false});
  for (std::size_t i = 0; i < problem.b_eq.size(); ++i) rows.push_back({problem.a_eq[i], problem.b_eq[i], true, false});
  for (int j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = -1.0;
    rows.push_back({a, 0.0, false, false});
    a[j] = 1.0;
    rows.push_back({a, box, false, true});
  }
  const int total = static_cast<int>(rows.size());

  auto feasible = [&](const std::vector<double>& x) {
    for (const auto& r : rows) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += r.a[j] * x[j];
      const double tol = 1e-9 * std::max(1.0, std::abs(r.b));
      if (r.equality ? std::abs(lhs - r.b) > tol : lhs > r.b + tol) return false;
    }
    return true;
  };
  auto touches_box = [&](const std::vector<double>& x) {
    return std::any_of(x.begin(), x.end(), [&](double v) { return v > box * (1 - 1e-9); });
  };

  lp_solution out;
  double best_inner = std::numeric_limits<double>::infinity();
  double best_any = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  if (n == 0) return out;
  while (true) {
    // Gaussian elimination with partial pivoting on the chosen tight rows.
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m[i][j] = rows[pick[i]].a[j];
      m[i][n] = rows[pick[i]].b;
    }
    bool singular = false;
    for (int col = 0; col < n && !singular; ++col) {
      int p = col;
      for (int i = col + 1; i < n; ++i)
        if (std::abs(m[i][col]) > std::abs(m[p][col])) p = i;
      if (std::abs(m[p][col]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(m[p], m[col]);
      for (int i = 0; i < n; ++i) {
        if (i == col) continue;
        const double f = m[i][col] / m[col][col];
        for (int j = col; j <= n; ++j) m[i][j] -= f * m[col][j];
      }
    }
    if (!singular) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
      if (feasible(x)) {
        double value = 0.0;
        for (int j = 0; j < n; ++j) value += problem.c[j] * x[j];
        best_any = std::min(best_any, value);
        if (!touches_box(x) && value < best_inner) {
          best_inner = value;
          best_x = x;
        }
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }

  if (!std::isfinite(best_any)) {
    out.status = lp_status::infeasible;
  } else if (!std::isfinite(best_inner) ||
             best_any < best_inner - 1e-9 * std::max(1.0, std::abs(best_inner))) {
    out.status = lp_status::unbounded;
  } else {
    out.status = lp_status::optimal;
    out.x = best_x;
    out.value = best_inner;
  }
  return out;
}

}  // namespace cachecast
