#pragma once

// JSON views of the computed results. Rates are stored at full double
// precision; infinite values become null.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "cachecast/degraded.hpp"
#include "cachecast/lp_scheme.hpp"
#include "cachecast/simulator.hpp"
#include "cachecast/two_user.hpp"
#include "cachecast/upper_bound.hpp"

namespace cachecast {

using json = nlohmann::json;

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json one_based(const std::vector<int>& users) {
  json out = json::array();
  for (int u : users) out.push_back(u + 1);
  return out;
}

inline std::string permutation_label(const permutation& pi) {
  std::string out = "(";
  for (std::size_t i = 0; i < pi.size(); ++i) out += (i ? "," : "") + std::to_string(pi[i] + 1);
  return out + ")";
}

inline json to_json(const upper_bound_report& r) {
  json table = json::array();
  for (const auto& row : r.table)
    table.push_back({{"pi", one_based(row.pi)}, {"value", finite_or_null(row.value)}, {"status", to_string(row.status)}});
  return {{"value", finite_or_null(r.value)},
          {"argmin_pi", one_based(r.argmin)},
          {"table", table},
          {"omega_star", r.omega_star},
          {"omega_non_unique", r.omega_non_unique}};
}

inline json to_json(const allocation_check& c) {
  json margins = json::array();
  for (const auto& m : c.margins)
    margins.push_back({{"user", m.user + 1}, {"subset", m.subset.label()}, {"received", m.received}, {"margin", m.margin}});
  return {{"feasible", c.feasible}, {"margins", margins}, {"level_slack", c.level_slack}};
}

inline json to_json(const delivery_allocation& a) {
  json subsets = json::array();
  for (const auto& s : a.subsets) subsets.push_back(s.label());
  return {{"t", a.t}, {"rate", a.rate}, {"subsets", subsets}, {"y", a.y}};
}

inline json to_json(const degraded_result& r) {
  return {{"rate", r.rate}, {"t", r.t}, {"order", one_based(r.order)}, {"z", r.z}};
}

inline json to_json(const two_user_allocation& a) {
  json shares = json::array();
  for (const auto& s : a.shares)
    shares.push_back({{"individual1", s.individual1}, {"individual2", s.individual2}, {"common", s.common}});
  return {{"order", a.order},
          {"gamma", [&] {
             json g = json::array();
             for (double v : a.gamma) g.push_back(finite_or_null(v));
             return g;
           }()},
          {"u", a.u},
          {"alpha", a.alpha},
          {"v", a.v},
          {"beta", a.beta},
          {"f1", a.f1},
          {"f2", a.f2},
          {"rate", a.rate},
          {"individual_size", a.individual_size},
          {"common_size", a.common_size},
          {"shares", shares},
          {"margins", std::vector<double>(std::begin(a.margins), std::end(a.margins))}};
}

inline json to_json(const simulation_report& r) {
  json messages = json::array();
  for (const auto& m : r.messages)
    messages.push_back({{"user", m.user + 1},
                        {"subset", m.subset.label()},
                        {"span_total", m.span_total},
                        {"delivered", m.delivered},
                        {"required", m.required},
                        {"empirical_margin", m.empirical_margin},
                        {"analytic_margin", m.analytic_margin},
                        {"sigma", m.sigma},
                        {"decodable", m.decodable}});
  return {{"n", r.n},
          {"seed", r.seed},
          {"t", r.t},
          {"rate", r.rate},
          {"messages", messages},
          {"user_decodable", r.user_decodable},
          {"ccdf", {{"estimate", r.ccdf.estimate}, {"std_error", r.ccdf.std_error}}}};
}

}  // namespace cachecast
