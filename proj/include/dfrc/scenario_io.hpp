#pragma once

#include <cctype>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dfrc/scenario.hpp"

namespace dfrc {

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError(path + (path.empty() ? "" : ".") + item.key() + ": unknown key");
  }
}

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline double as_number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}

inline std::int64_t as_integer(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t as_seed(const Json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(field + ": expected a non-negative integer");
}

/// Splits "10dB" into (10, "db"). Units are matched case-insensitively.
inline std::pair<double, std::string> split_unit(const std::string& text, const std::string& field) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError(field + ": cannot parse '" + text + "'");
  }
  std::string unit;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i])))
      unit += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  }
  return {value, unit};
}

/// Linear number, or a string with a dB suffix.
inline double parse_ratio(const Json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ConfigError(field + ": expected a number or a string like \"10dB\"");
  const auto [value, unit] = split_unit(v.get<std::string>(), field);
  if (unit == "db") return db_to_linear(value);
  if (unit.empty()) return value;
  throw ConfigError(field + ": unknown unit '" + unit + "'");
}

/// Watts as a number, or a string in dBm or W.
inline double parse_power(const Json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ConfigError(field + ": expected a number or a string like \"40dBm\"");
  const auto [value, unit] = split_unit(v.get<std::string>(), field);
  if (unit == "dbm") return dbm_to_watts(value);
  if (unit == "w" || unit.empty()) return value;
  if (unit == "dbw") return db_to_linear(value);
  throw ConfigError(field + ": unknown unit '" + unit + "'");
}

inline std::vector<AngleInterval> parse_regions(const Json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field + ": expected an array of [lo, hi] pairs");
  std::vector<AngleInterval> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(f + ": expected [lo, hi]");
    out.push_back({as_number(v[i][0], f), as_number(v[i][1], f)});
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const Json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if constexpr (std::is_integral_v<T>) {
      out.push_back(static_cast<T>(as_integer(v[i], f)));
    } else {
      out.push_back(static_cast<T>(as_number(v[i], f)));
    }
  }
  return out;
}

inline void parse_admm(const Json& j, const std::string& path, AdmmConfig& c, bool with_eta) {
  if (with_eta) {
    reject_unknown(j, path, {"eta", "rho", "max_iterations", "primal_tol", "dual_tol", "parallelism"});
  } else {
    reject_unknown(j, path, {"rho", "max_iterations", "primal_tol", "dual_tol"});
  }
  if (with_eta && j.contains("eta")) c.eta = as_number(j["eta"], join(path, "eta"));
  if (j.contains("rho")) c.rho = as_number(j["rho"], join(path, "rho"));
  if (j.contains("max_iterations")) c.max_iterations = static_cast<int>(as_integer(j["max_iterations"], join(path, "max_iterations")));
  if (j.contains("primal_tol") && !j["primal_tol"].is_null()) c.primal_tol = as_number(j["primal_tol"], join(path, "primal_tol"));
  if (j.contains("dual_tol") && !j["dual_tol"].is_null()) c.dual_tol = as_number(j["dual_tol"], join(path, "dual_tol"));
  if (with_eta && j.contains("parallelism")) c.parallelism = static_cast<int>(as_integer(j["parallelism"], join(path, "parallelism")));
}

}  // namespace detail

/// Builds a validated Scenario from JSON. Missing keys keep their defaults.
inline Scenario parse_scenario(const Json& j) {
  using namespace detail;
  reject_unknown(j, "", {"array", "num_selected", "users", "grids", "thresholds", "antenna_power", "admm", "refit",
                         "seed", "sweep", "description"});
  Scenario s;
  if (j.contains("array")) {
    const auto& a = j["array"];
    reject_unknown(a, "array", {"num_antennas", "element_spacing"});
    if (a.contains("num_antennas")) s.geometry.num_antennas = as_integer(a["num_antennas"], "array.num_antennas");
    if (a.contains("element_spacing")) s.geometry.element_spacing = as_number(a["element_spacing"], "array.element_spacing");
  }
  if (j.contains("num_selected")) s.num_selected = as_integer(j["num_selected"], "num_selected");
  if (j.contains("users")) {
    const auto& u = j["users"];
    reject_unknown(u, "users", {"angles_deg", "channel_model", "gain", "channel_seed", "noise_variance", "sinr_target"});
    if (u.contains("angles_deg")) s.user_angles = parse_list<double>(u["angles_deg"], "users.angles_deg");
    if (u.contains("channel_model")) {
      const auto& m = u["channel_model"];
      if (!m.is_string()) throw ConfigError("users.channel_model: expected \"los\" or \"rayleigh\"");
      const auto name = m.get<std::string>();
      if (name == "los") {
        s.channel_model = ChannelModel::kLineOfSight;
      } else if (name == "rayleigh") {
        s.channel_model = ChannelModel::kRayleigh;
      } else {
        throw ConfigError("users.channel_model: expected \"los\" or \"rayleigh\", got '" + name + "'");
      }
    }
    if (u.contains("gain")) s.channel_gain = as_number(u["gain"], "users.gain");
    if (u.contains("channel_seed")) s.channel_seed = as_seed(u["channel_seed"], "users.channel_seed");
    if (u.contains("noise_variance")) s.noise_variance = as_number(u["noise_variance"], "users.noise_variance");
    if (u.contains("sinr_target")) s.sinr_target = parse_ratio(u["sinr_target"], "users.sinr_target");
  }
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    reject_unknown(g, "grids", {"mainlobe_deg", "stopband_deg", "mainlobe_step_deg", "stopband_step_deg"});
    if (g.contains("mainlobe_deg")) s.mainlobe = parse_regions(g["mainlobe_deg"], "grids.mainlobe_deg");
    if (g.contains("stopband_deg")) s.stopband = parse_regions(g["stopband_deg"], "grids.stopband_deg");
    if (g.contains("mainlobe_step_deg")) s.mainlobe_step = as_number(g["mainlobe_step_deg"], "grids.mainlobe_step_deg");
    if (g.contains("stopband_step_deg")) s.stopband_step = as_number(g["stopband_step_deg"], "grids.stopband_step_deg");
  }
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    reject_unknown(t, "thresholds", {"passband", "stopband"});
    if (t.contains("passband")) s.passband_threshold = as_number(t["passband"], "thresholds.passband");
    if (t.contains("stopband")) s.stopband_threshold = as_number(t["stopband"], "thresholds.stopband");
  }
  if (j.contains("antenna_power")) s.antenna_power = parse_power(j["antenna_power"], "antenna_power");
  if (j.contains("admm")) parse_admm(j["admm"], "admm", s.admm, true);
  if (j.contains("refit")) parse_admm(j["refit"], "refit", s.refit, false);
  if (j.contains("seed")) s.seed = as_seed(j["seed"], "seed");
  if (j.contains("sweep")) {
    const auto& w = j["sweep"];
    reject_unknown(w, "sweep", {"k_values", "m_values", "user_span_deg", "trials"});
    if (w.contains("k_values")) s.k_values = parse_list<Index>(w["k_values"], "sweep.k_values");
    if (w.contains("m_values")) s.m_values = parse_list<Index>(w["m_values"], "sweep.m_values");
    if (w.contains("user_span_deg")) {
      const auto span = parse_list<double>(w["user_span_deg"], "sweep.user_span_deg");
      if (span.size() != 2) throw ConfigError("sweep.user_span_deg: expected [lo, hi]");
      s.user_span = {span[0], span[1]};
    }
    if (w.contains("trials")) s.trials = static_cast<int>(as_integer(w["trials"], "sweep.trials"));
  }
  s.validate();
  return s;
}

inline Scenario parse_scenario_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

/// Canonical JSON form in linear units; parse_scenario(to_json(s)) == s.
inline Json to_json(const Scenario& s) {
  auto regions = [](const std::vector<AngleInterval>& r) {
    Json a = Json::array();
    for (const auto& i : r) a.push_back({i.lo, i.hi});
    return a;
  };
  auto admm = [](const AdmmConfig& c, bool with_eta) {
    Json o;
    if (with_eta) o["eta"] = c.eta;
    o["rho"] = c.rho;
    o["max_iterations"] = c.max_iterations;
    o["primal_tol"] = c.primal_tol ? Json(*c.primal_tol) : Json(nullptr);
    o["dual_tol"] = c.dual_tol ? Json(*c.dual_tol) : Json(nullptr);
    if (with_eta) o["parallelism"] = c.parallelism;
    return o;
  };
  Json j;
  j["array"] = {{"num_antennas", s.geometry.num_antennas}, {"element_spacing", s.geometry.element_spacing}};
  j["num_selected"] = s.num_selected;
  j["users"] = {{"angles_deg", s.user_angles},
                {"channel_model", s.channel_model == ChannelModel::kLineOfSight ? "los" : "rayleigh"},
                {"gain", s.channel_gain},
                {"channel_seed", s.channel_seed},
                {"noise_variance", s.noise_variance},
                {"sinr_target", s.sinr_target}};
  j["grids"] = {{"mainlobe_deg", regions(s.mainlobe)},
                {"stopband_deg", regions(s.stopband)},
                {"mainlobe_step_deg", s.mainlobe_step},
                {"stopband_step_deg", s.stopband_step}};
  j["thresholds"] = {{"passband", s.passband_threshold}, {"stopband", s.stopband_threshold}};
  j["antenna_power"] = s.antenna_power;
  j["admm"] = admm(s.admm, true);
  j["refit"] = admm(s.refit, false);
  j["seed"] = s.seed;
  j["sweep"] = {{"k_values", s.k_values},
                {"m_values", s.m_values},
                {"user_span_deg", {s.user_span.lo, s.user_span.hi}},
                {"trials", s.trials}};
  return j;
}

inline std::string write_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

/// 64-bit FNV-1a of the canonical scenario text, as 16 hex digits.
inline std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(s).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dfrc
