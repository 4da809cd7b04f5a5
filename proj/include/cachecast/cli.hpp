#pragma once

// Command-line front end. run() parses arguments, executes one command and
// writes its report to `out`; diagnostics go to `err`.
//
// Exit status: 0 success, 2 invalid input, 3 solver failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cachecast/caching.hpp"
#include "cachecast/config.hpp"
#include "cachecast/degraded.hpp"
#include "cachecast/lp_scheme.hpp"
#include "cachecast/report.hpp"
#include "cachecast/simulator.hpp"
#include "cachecast/two_user.hpp"
#include "cachecast/upper_bound.hpp"

namespace cachecast {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_solver = 3;

inline std::string format_rate(double v) {
  if (!std::isfinite(v)) return "inf";
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

namespace detail {

inline std::string full_precision(double v) {
  if (!std::isfinite(v)) return "inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline void require_central(const scenario_config& cfg, const std::string& command) {
  if (!cfg.central)
    throw error(errc::bad_config, cfg.source + ": '" + command + "' needs the central placement; the configured intervals differ from it");
}

inline void print_check(std::ostream& out, const allocation_check& check) {
  out << "feasible " << (check.feasible ? "yes" : "no") << '\n';
  for (const auto& m : check.margins)
    out << "  user " << m.user + 1 << " message " << m.subset.label() << " margin " << format_rate(m.margin) << '\n';
  for (std::size_t l = 0; l < check.level_slack.size(); ++l)
    out << "  level " << l + 1 << " slack " << format_rate(check.level_slack[l]) << '\n';
}

inline void print_allocation(std::ostream& out, const delivery_allocation& alloc) {
  out << "y (rows: levels; columns:";
  for (const auto& s : alloc.subsets) out << ' ' << s.label();
  out << ")\n";
  for (const auto& row : alloc.y) {
    out << ' ';
    for (double v : row) out << ' ' << format_rate(v);
    out << '\n';
  }
}

inline void write_matrix_csv(const std::string& path, const delivery_lp& lp) {
  std::ofstream csv(path);
  if (!csv) throw error(errc::bad_config, path + ": cannot write");
  csv << "\"row\"";
  for (const auto& label : lp.column_labels) csv << ",\"" << label << '"';
  csv << '\n';
  csv << std::setprecision(17);
  for (std::size_t r = 0; r < lp.g.size(); ++r) {
    csv << "\"G" << lp.g_labels[r] << '"';
    for (double v : lp.g[r]) csv << ',' << v;
    csv << '\n';
  }
  for (std::size_t r = 0; r < lp.h.size(); ++r) {
    csv << "\"H" << r + 1 << '"';
    for (double v : lp.h[r]) csv << ',' << v;
    csv << '\n';
  }
}

struct mu_range {
  rational start, stop, step;
};

inline mu_range parse_mu_range(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) throw error(errc::bad_config, "--mu expects start:stop:step, got '" + text + "'");
  mu_range r{parse_rational(text.substr(0, first)), parse_rational(text.substr(first + 1, second - first - 1)),
             parse_rational(text.substr(second + 1))};
  if (r.step <= 0) throw error(errc::bad_config, "--mu step must be positive");
  if (r.start < 0 || r.stop > 1 || r.start > r.stop) throw error(errc::mu_out_of_range, "--mu range must lie in [0,1]");
  return r;
}

}  // namespace detail

inline int run_two_user(const scenario_config& cfg, bool as_json, std::ostream& out) {
  detail::require_central(cfg, "rates two-user");
  const double rate = optimal_rate_two_user(cfg.stats, cfg.mu);
  json report = {{"command", "two-user"}, {"mu", format_rational(cfg.mu)}, {"rate", finite_or_null(rate)}};
  std::optional<two_user_allocation> alloc;
  if (cfg.mu * 2 <= 1) {
    alloc = achievable_allocation_two_user(cfg.stats, cfg.mu);
    report["allocation"] = to_json(*alloc);
  }
  if (as_json) {
    out << report.dump(2) << '\n';
    return exit_ok;
  }
  out << "rate " << format_rate(rate) << '\n';
  if (alloc) {
    out << "f1 " << format_rate(alloc->f1) << " f2 " << format_rate(alloc->f2) << '\n';
    out << "u " << alloc->u << " alpha " << format_rate(alloc->alpha) << " v " << alloc->v << " beta "
        << format_rate(alloc->beta) << '\n';
    for (std::size_t l = 0; l < alloc->shares.size(); ++l) {
      const auto& s = alloc->shares[l];
      out << "  level " << l + 1 << " individual1 " << format_rate(s.individual1) << " individual2 "
          << format_rate(s.individual2) << " common " << format_rate(s.common) << '\n';
    }
  }
  return exit_ok;
}

inline int run_degraded(const scenario_config& cfg, bool as_json, std::ostream& out) {
  detail::require_central(cfg, "rates degraded");
  const auto result = degraded_optimal_rate(cfg.stats, cfg.mu);
  const auto y = z_to_y(result);
  const auto check = check_allocation(y, cfg.stats, result.rate);
  if (as_json) {
    json report = to_json(result);
    report["command"] = "degraded";
    report["mu"] = format_rational(cfg.mu);
    report["y"] = to_json(y);
    report["check"] = to_json(check);
    out << report.dump(2) << '\n';
    return exit_ok;
  }
  out << "rate " << format_rate(result.rate) << '\n';
  out << "order (weakest first)";
  for (int u : result.order) out << ' ' << u + 1;
  out << '\n';
  for (std::size_t l = 0; l < result.z.size(); ++l) {
    out << "  z level " << l + 1 << ':';
    for (double v : result.z[l]) out << ' ' << format_rate(v);
    out << '\n';
  }
  detail::print_allocation(out, y);
  detail::print_check(out, check);
  return exit_ok;
}

inline int run_upper(const scenario_config& cfg, bool table, bool as_json, std::ostream& out) {
  const auto report = upper_bound_rate(cfg.stats, make_caching_tuple(cfg.strategy));
  if (as_json) {
    json j = to_json(report);
    j["command"] = "upper";
    j["mu"] = format_rational(cfg.mu);
    out << j.dump(2) << '\n';
    return exit_ok;
  }
  out << "value " << format_rate(report.value) << '\n';
  out << "argmin " << permutation_label(report.argmin) << '\n';
  out << "omega_star";
  for (double w : report.omega_star) out << ' ' << format_rate(w);
  if (report.omega_non_unique) out << " (not unique)";
  out << '\n';
  if (table)
    for (const auto& row : report.table) out << "pi " << permutation_label(row.pi) << ' ' << format_rate(row.value) << '\n';
  return exit_ok;
}

inline int run_achievable(const scenario_config& cfg, const std::string& dump_path, bool as_json, std::ostream& out) {
  detail::require_central(cfg, "rates achievable");
  const auto alloc = achievable_rate_lp(cfg.stats, cfg.mu);
  if (!dump_path.empty()) detail::write_matrix_csv(dump_path, build_delivery_lp(cfg.stats, alloc.t));
  const auto check = check_allocation(alloc, cfg.stats, alloc.rate);
  std::optional<allocation_check> given;
  if (cfg.allocation) given = check_allocation(*cfg.allocation, cfg.stats, cfg.allocation->rate);
  if (as_json) {
    json report = to_json(alloc);
    report["command"] = "achievable";
    report["mu"] = format_rational(cfg.mu);
    report["check"] = to_json(check);
    if (given) {
      report["given_allocation"] = to_json(*cfg.allocation);
      report["given_check"] = to_json(*given);
    }
    out << report.dump(2) << '\n';
    return exit_ok;
  }
  out << "rate " << format_rate(alloc.rate) << '\n';
  detail::print_allocation(out, alloc);
  if (given) {
    out << "configured allocation at rate " << format_rate(cfg.allocation->rate) << ": ";
    detail::print_check(out, *given);
  }
  return exit_ok;
}

inline int run_simulate(const scenario_config& cfg, std::size_t n, std::uint64_t seed, const std::string& trace,
                        bool as_json, std::ostream& out) {
  detail::require_central(cfg, "simulate");
  const delivery_allocation alloc = cfg.allocation ? *cfg.allocation : achievable_rate_lp(cfg.stats, cfg.mu);
  const auto report = simulate_delivery(cfg.stats, alloc, alloc.rate, n, seed);
  if (!trace.empty()) {
    std::ofstream csv(trace);
    if (!csv) throw error(errc::bad_config, trace + ": cannot write");
    write_trace(csv, report.states);
  }
  if (as_json) {
    json j = to_json(report);
    j["command"] = "simulate";
    out << j.dump(2) << '\n';
    return exit_ok;
  }
  out << "n " << report.n << " seed " << report.seed << " rate " << format_rate(report.rate) << '\n';
  for (const auto& m : report.messages)
    out << "user " << m.user + 1 << " message " << m.subset.label() << " delivered " << m.delivered << " required "
        << m.required << " margin " << format_rate(m.empirical_margin) << " analytic " << format_rate(m.analytic_margin)
        << " sigma " << format_rate(m.sigma) << (m.decodable ? " decodable" : " short") << '\n';
  for (std::size_t k = 0; k < report.user_decodable.size(); ++k)
    out << "user " << k + 1 << (report.user_decodable[k] ? " decodes" : " fails") << '\n';
  return exit_ok;
}

inline int run_sweep(const scenario_config& cfg, const std::string& range_text, std::ostream& out) {
  detail::require_central(cfg, "sweep");
  const auto range = detail::parse_mu_range(range_text);
  bool degraded = true;
  try {
    degraded_order(cfg.stats);
  } catch (const error&) {
    degraded = false;
  }
  const int users = cfg.num_users;
  out << "mu,mu_exact,f_lp,f_star,f_bar\n";
  for (rational mu = range.start; mu <= range.stop; mu += range.step) {
    const bool integer_load = is_integer(mu * users) && mu < 1;
    std::string f_lp, f_bar;
    if (integer_load) {
      f_lp = detail::full_precision(achievable_rate_lp(cfg.stats, mu).rate);
      if (degraded) f_bar = detail::full_precision(degraded_optimal_rate(cfg.stats, mu).rate);
    }
    const double f_star = upper_bound_rate(cfg.stats, make_caching_tuple(central_strategy(users, mu))).value;
    out << detail::full_precision(to_double(mu)) << ',' << format_rational(mu) << ',' << f_lp << ','
        << detail::full_precision(f_star) << ',' << f_bar << '\n';
  }
  return exit_ok;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Source rates of cache-aided time-varying broadcast channels", "cachecast"};
  app.require_subcommand(1);

  std::string config_path, dump_path, trace_path, mu_range;
  bool as_json = false, table = false;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  auto* rates = app.add_subcommand("rates", "compute a rate for a scenario");
  rates->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "scenario JSON file")->required();
    cmd->add_flag("--json", as_json, "emit the report as JSON");
  };
  auto* two_user = rates->add_subcommand("two-user", "exact optimum for two users");
  add_common(two_user);
  auto* degraded = rates->add_subcommand("degraded", "exact optimum for a degraded channel");
  add_common(degraded);
  auto* upper = rates->add_subcommand("upper", "upper bound over all weight orderings");
  add_common(upper);
  upper->add_flag("--table", table, "list the value of every ordering");
  auto* achievable = rates->add_subcommand("achievable", "rate of the coded multicast LP");
  add_common(achievable);
  achievable->add_option("--dump-matrices", dump_path, "write the G and H blocks as CSV");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo delivery check");
  add_common(simulate);
  auto* n_opt = simulate->add_option("--n", n, "channel uses")->check(CLI::PositiveNumber);
  auto* seed_opt = simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("--trace", trace_path, "write the sampled levels as CSV");

  auto* sweep = app.add_subcommand("sweep", "rates over a grid of cache sizes, as CSV");
  sweep->add_option("config", config_path, "scenario JSON file")->required();
  sweep->add_option("--mu", mu_range, "start:stop:step, fractions allowed")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    const auto cfg = load_config(config_path);
    if (two_user->parsed()) return run_two_user(cfg, as_json, out);
    if (degraded->parsed()) return run_degraded(cfg, as_json, out);
    if (upper->parsed()) return run_upper(cfg, table, as_json, out);
    if (achievable->parsed()) return run_achievable(cfg, dump_path, as_json, out);
    if (simulate->parsed())
      return run_simulate(cfg, n_opt->count() ? n : cfg.sim_n, seed_opt->count() ? seed : cfg.sim_seed, trace_path,
                          as_json, out);
    if (sweep->parsed()) return run_sweep(cfg, mu_range, out);
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return is_solver_failure(e.code()) ? exit_solver : exit_invalid;
  }
  return exit_invalid;
}

}  // namespace cachecast
