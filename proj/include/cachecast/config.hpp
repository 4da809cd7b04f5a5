#pragma once

// Scenario files: one JSON document describing the channel, the cache size and
// optionally an explicit placement, demands, simulation settings and a
// hand-made delivery allocation.

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cachecast/caching.hpp"
#include "cachecast/channel.hpp"
#include "cachecast/error.hpp"
#include "cachecast/lp_scheme.hpp"
#include "cachecast/rational.hpp"

namespace cachecast {

struct scenario_config {
  std::string source;  // file name used in diagnostics
  int num_users = 0;
  int num_levels = 0;
  channel_stats stats;
  rational mu;
  caching_strategy strategy;
  bool central = true;
  int files = 0;
  std::vector<int> demands;  // one-based file indices
  std::size_t sim_n = 100000;
  std::uint64_t sim_seed = 1;
  std::optional<delivery_allocation> allocation;
};

namespace detail {

struct located_text {
  std::string name;
  std::string text;

  int line_of_offset(std::size_t offset) const {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
  }

  // Line of the first occurrence of "key", or 0 when absent.
  int line_of_key(const std::string& key) const {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(pos);
  }

  std::string where(const std::string& key) const {
    const int line = line_of_key(key);
    return line > 0 ? name + ":" + std::to_string(line) + ": " : name + ": ";
  }
};

inline rational json_rational(const nlohmann::json& value, const std::string& what) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return rational(value.get<long long>());
  if (value.is_number()) {
    // Decimal literals are taken at their printed value, not their binary one.
    std::ostringstream os;
    os.precision(17);
    os << value.get<double>();
    return parse_rational(os.str());
  }
  throw error(errc::bad_config, what + " must be a number or a fraction string");
}

}  // namespace detail

inline scenario_config parse_config(const std::string& text, const std::string& name = "config") {
  detail::located_text src{name, text};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw error(errc::bad_config, name + ":" + std::to_string(src.line_of_offset(e.byte == 0 ? 0 : e.byte - 1)) +
                                      ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw error(errc::bad_config, name + ":1: top level must be an object");

  auto fail = [&](const std::string& key, const std::string& message) -> error {
    return error(errc::bad_config, src.where(key) + message);
  };
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw error(errc::bad_config, name + ": missing key \"" + key + "\"");
    return doc.at(key);
  };

  scenario_config cfg;
  cfg.source = name;
  try {
    const auto& k = require("K");
    const auto& b = require("B");
    if (!k.is_number_integer() || k.get<long long>() < 1) throw fail("K", "K must be a positive integer");
    if (!b.is_number_integer() || b.get<long long>() < 1) throw fail("B", "B must be a positive integer");
    cfg.num_users = k.get<int>();
    cfg.num_levels = b.get<int>();

    const auto& grid = require("ccdf");
    if (!grid.is_array() || static_cast<int>(grid.size()) != cfg.num_users)
      throw fail("ccdf", "ccdf must hold one row per user (" + std::to_string(cfg.num_users) + ")");
    std::vector<ccdf_row> rows;
    for (const auto& row : grid) {
      if (!row.is_array() || static_cast<int>(row.size()) != cfg.num_levels)
        throw fail("ccdf", "every ccdf row must hold B = " + std::to_string(cfg.num_levels) + " numbers");
      ccdf_row values;
      for (const auto& v : row) {
        if (!v.is_number()) throw fail("ccdf", "ccdf entries must be numbers");
        values.push_back(v.get<double>());
      }
      rows.push_back(std::move(values));
    }
    try {
      cfg.stats = validate_stats(std::move(rows));
    } catch (const error& e) {
      throw error(e.code(), src.where("ccdf") + e.message());
    }

    const auto& mu = require("mu");
    if (!mu.is_string()) throw fail("mu", "mu must be a fraction string such as \"1/3\"");
    try {
      cfg.mu = parse_rational(mu.get<std::string>());
    } catch (const error& e) {
      throw error(e.code(), src.where("mu") + e.message());
    }
    if (cfg.mu < 0 || cfg.mu > 1) throw error(errc::mu_out_of_range, src.where("mu") + "mu must lie in [0,1]");

    cfg.strategy = central_strategy(cfg.num_users, cfg.mu);
    if (doc.contains("caching")) {
      const auto& caching = doc.at("caching");
      if (!caching.is_object() || !caching.contains("intervals"))
        throw fail("caching", "caching must be an object with an \"intervals\" list");
      const auto& per_user = caching.at("intervals");
      if (!per_user.is_array() || static_cast<int>(per_user.size()) != cfg.num_users)
        throw fail("intervals", "intervals must hold one list per user");
      std::vector<std::vector<interval>> caches;
      for (const auto& list : per_user) {
        if (!list.is_array()) throw fail("intervals", "each user's intervals must be a list of pairs");
        std::vector<interval> parts;
        for (const auto& pair : list) {
          if (!pair.is_array() || pair.size() != 2) throw fail("intervals", "each interval is a pair [lo, hi]");
          parts.push_back({detail::json_rational(pair[0], "interval end"), detail::json_rational(pair[1], "interval end")});
        }
        caches.push_back(std::move(parts));
      }
      try {
        caching_strategy explicit_strategy(std::move(caches), cfg.mu);
        cfg.central = true;
        for (int u = 0; u < cfg.num_users; ++u)
          if (detail::normalize(explicit_strategy.cache(u)) != cfg.strategy.cache(u)) cfg.central = false;
        cfg.strategy = std::move(explicit_strategy);
      } catch (const error& e) {
        throw error(e.code(), src.where("intervals") + e.message());
      }
    }

    cfg.files = cfg.num_users;
    if (doc.contains("files")) {
      const auto& files = doc.at("files");
      if (!files.is_number_integer()) throw fail("files", "files must be an integer");
      cfg.files = files.get<int>();
    }
    if (cfg.files < cfg.num_users) throw fail("files", "the library needs at least K files");
    if (doc.contains("demands")) {
      const auto& demands = doc.at("demands");
      if (!demands.is_array() || static_cast<int>(demands.size()) != cfg.num_users)
        throw fail("demands", "demands must name one file per user");
      for (const auto& d : demands) {
        if (!d.is_number_integer() || d.get<int>() < 1 || d.get<int>() > cfg.files)
          throw fail("demands", "demands must be file indices in [1, files]");
        cfg.demands.push_back(d.get<int>());
      }
      auto sorted = cfg.demands;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw fail("demands", "demands must be distinct");
    } else {
      for (int k = 1; k <= cfg.num_users; ++k) cfg.demands.push_back(k);
    }

    if (doc.contains("simulation")) {
      const auto& sim = doc.at("simulation");
      if (!sim.is_object()) throw fail("simulation", "simulation must be an object");
      if (sim.contains("n")) {
        if (!sim.at("n").is_number_unsigned() || sim.at("n").get<std::size_t>() == 0)
          throw fail("simulation", "simulation.n must be a positive integer");
        cfg.sim_n = sim.at("n").get<std::size_t>();
      }
      if (sim.contains("seed")) {
        if (!sim.at("seed").is_number_unsigned()) throw fail("simulation", "simulation.seed must be a nonnegative integer");
        cfg.sim_seed = sim.at("seed").get<std::uint64_t>();
      }
    }

    if (doc.contains("allocation")) {
      const auto& a = doc.at("allocation");
      if (!a.is_object() || !a.contains("rate") || !a.contains("y"))
        throw fail("allocation", "allocation needs \"rate\" and \"y\"");
      const rational load = cfg.mu * cfg.num_users;
      if (!is_integer(load)) throw fail("allocation", "an explicit allocation needs K mu to be an integer");
      const int t = static_cast<int>(floor_of(load));
      if (t >= cfg.num_users) throw fail("allocation", "no delivery is needed when mu = 1");
      auto alloc = empty_allocation(cfg.num_users, cfg.num_levels, t);
      alloc.rate = to_double(detail::json_rational(a.at("rate"), "allocation.rate"));
      const auto& y = a.at("y");
      if (!y.is_array() || static_cast<int>(y.size()) != cfg.num_levels)
        throw fail("allocation", "allocation.y must hold one row per level");
      for (int l = 0; l < cfg.num_levels; ++l) {
        if (!y[l].is_array() || y[l].size() != alloc.subsets.size())
          throw fail("allocation", "each allocation.y row must hold C(K, t+1) = " +
                                       std::to_string(alloc.subsets.size()) + " entries");
        for (std::size_t s = 0; s < alloc.subsets.size(); ++s) {
          const double v = to_double(detail::json_rational(y[l][s], "allocation.y entry"));
          if (v < 0) throw fail("allocation", "allocation.y entries must be nonnegative");
          alloc.y[l][s] = v;
        }
      }
      cfg.allocation = std::move(alloc);
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::bad_config, name + ": " + e.what());
  }
  return cfg;
}

inline scenario_config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::bad_config, path + ": cannot open");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace cachecast
