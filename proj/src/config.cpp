#include "qcar/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qcar/response_metrics.hpp"

namespace qcar {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      fail(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

double get_number(const json& j, const std::string& path, double fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

template <typename Fn>
void with(const json& parent, const char* key, const std::string& path, Fn&& fn) {
  if (parent.contains(key)) fn(parent.at(key), path.empty() ? std::string(key) : path + "." + key);
}

// Runs `check` and rewrites invalid_argument as a ConfigError at `path`.
template <typename Fn>
void checked(const std::string& path, Fn&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

void parse_params(const json& j, const std::string& path, SuspensionParams& p) {
  reject_unknown(j, path, {"b_s", "b_us", "k_s", "k_us", "m_s", "m_us"});
  with(j, "b_s", path, [&](const json& v, const std::string& q) { p.b_s = get_number(v, q, p.b_s); });
  with(j, "b_us", path, [&](const json& v, const std::string& q) { p.b_us = get_number(v, q, p.b_us); });
  with(j, "k_s", path, [&](const json& v, const std::string& q) { p.k_s = get_number(v, q, p.k_s); });
  with(j, "k_us", path, [&](const json& v, const std::string& q) { p.k_us = get_number(v, q, p.k_us); });
  with(j, "m_s", path, [&](const json& v, const std::string& q) { p.m_s = get_number(v, q, p.m_s); });
  with(j, "m_us", path, [&](const json& v, const std::string& q) { p.m_us = get_number(v, q, p.m_us); });
  checked(path, [&] { p.validate(); });
}

void parse_weights(const json& j, const std::string& path, LqrWeights& w) {
  reject_unknown(j, path, {"Q", "Q_diag", "R"});
  if (j.contains("Q") && j.contains("Q_diag")) fail(path, "give either Q or Q_diag, not both");
  with(j, "Q_diag", path, [&](const json& v, const std::string& q) {
    if (!v.is_array() || v.size() != 4) fail(q, "expected an array of 4 numbers");
    Eigen::Vector4d d;
    for (int i = 0; i < 4; ++i) d[i] = get_number(v[i], q + "[" + std::to_string(i) + "]", 0.0);
    w.Q = d.asDiagonal();
  });
  with(j, "Q", path, [&](const json& v, const std::string& q) {
    if (!v.is_array() || v.size() != 4) fail(q, "expected a 4x4 array");
    w.Q = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      if (!v[i].is_array() || v[i].size() != 4) fail(q, "expected a 4x4 array");
      for (int k = 0; k < 4; ++k) {
        w.Q(i, k) = get_number(v[i][k], q + "[" + std::to_string(i) + "][" + std::to_string(k) + "]", 0.0);
      }
    }
  });
  with(j, "R", path, [&](const json& v, const std::string& q) {
    w.R = get_number(v, q, w.R);
    if (!(w.R > 0.0)) fail(q, "R must be positive");
  });
  checked(path, [&] { w.validate(); });
}

void parse_loop(const json& j, const std::string& path, PidGains& g, bool& enabled, double& reference) {
  reject_unknown(j, path, {"k_p", "k_i", "k_d", "n_filter", "enabled", "reference"});
  with(j, "k_p", path, [&](const json& v, const std::string& q) { g.k_p = get_number(v, q, g.k_p); });
  with(j, "k_i", path, [&](const json& v, const std::string& q) { g.k_i = get_number(v, q, g.k_i); });
  with(j, "k_d", path, [&](const json& v, const std::string& q) { g.k_d = get_number(v, q, g.k_d); });
  with(j, "n_filter", path,
       [&](const json& v, const std::string& q) { g.n_filter = get_number(v, q, g.n_filter); });
  with(j, "enabled", path, [&](const json& v, const std::string& q) {
    if (!v.is_boolean()) fail(q, "expected true or false");
    enabled = v.get<bool>();
  });
  with(j, "reference", path,
       [&](const json& v, const std::string& q) { reference = get_number(v, q, reference); });
}

void parse_pid(const json& j, const std::string& path, PidSettings& pid) {
  reject_unknown(j, path, {"motion", "travel", "n_filter", "motion_tracks_road", "force_limit"});
  // A shared n_filter applies first so per-loop values can override it.
  with(j, "n_filter", path, [&](const json& v, const std::string& q) {
    const double n = get_number(v, q, pid.motion.n_filter);
    pid.motion.n_filter = pid.travel.n_filter = n;
  });
  with(j, "motion", path, [&](const json& v, const std::string& q) {
    parse_loop(v, q, pid.motion, pid.motion_enabled, pid.r_motion);
  });
  with(j, "travel", path, [&](const json& v, const std::string& q) {
    parse_loop(v, q, pid.travel, pid.travel_enabled, pid.r_travel);
  });
  with(j, "motion_tracks_road", path, [&](const json& v, const std::string& q) {
    if (!v.is_boolean()) fail(q, "expected true or false");
    pid.motion_tracks_road = v.get<bool>();
  });
  with(j, "force_limit", path, [&](const json& v, const std::string& q) {
    if (v.is_null()) {
      pid.force_limit.reset();
      return;
    }
    const double limit = get_number(v, q, 0.0);
    if (!(limit > 0.0)) fail(q, "force_limit must be positive");
    pid.force_limit = limit;
  });
  checked(path + ".motion", [&] { pid.motion.validate(); });
  checked(path + ".travel", [&] { pid.travel.validate(); });
}

void parse_road(const json& j, const std::string& path, RoadSignal& r) {
  reject_unknown(j, path, {"kind", "step_amplitude", "step_time", "pulse_width", "noise_power",
                           "noise_sample_time", "seed"});
  with(j, "kind", path, [&](const json& v, const std::string& q) {
    if (!v.is_string()) fail(q, "expected a string");
    checked(q, [&] { r.kind = road_kind_from_string(v.get<std::string>()); });
  });
  with(j, "step_amplitude", path,
       [&](const json& v, const std::string& q) { r.step_amplitude = get_number(v, q, r.step_amplitude); });
  with(j, "step_time", path,
       [&](const json& v, const std::string& q) { r.step_time = get_number(v, q, r.step_time); });
  with(j, "pulse_width", path,
       [&](const json& v, const std::string& q) { r.pulse_width = get_number(v, q, r.pulse_width); });
  with(j, "noise_power", path,
       [&](const json& v, const std::string& q) { r.noise_power = get_number(v, q, r.noise_power); });
  with(j, "noise_sample_time", path, [&](const json& v, const std::string& q) {
    r.noise_sample_time = get_number(v, q, r.noise_sample_time);
  });
  with(j, "seed", path, [&](const json& v, const std::string& q) {
    if (!v.is_number_unsigned()) fail(q, "expected a non-negative integer");
    r.seed = v.get<std::uint64_t>();
  });
}

ScenarioSpec parse_scenario(const json& j, const std::string& path, std::size_t index) {
  reject_unknown(j, path, {"name", "road", "sprung_mass_scale", "sprung_mass_override", "horizon",
                           "dt", "settling_band", "reference"});
  ScenarioSpec s;
  with(j, "road", path, [&](const json& v, const std::string& q) { parse_road(v, q, s.road); });
  const bool noisy = s.road.kind == RoadKind::kStepPlusNoise;
  if (noisy) {
    s.horizon = 10.0;
    s.settling_band = 0.05;
    s.reference = ReferenceMode::kAsymptote;
  }
  with(j, "sprung_mass_scale", path, [&](const json& v, const std::string& q) {
    s.sprung_mass_scale = get_number(v, q, s.sprung_mass_scale);
  });
  with(j, "sprung_mass_override", path, [&](const json& v, const std::string& q) {
    if (!v.is_null()) s.sprung_mass_override = get_number(v, q, 0.0);
  });
  with(j, "horizon", path, [&](const json& v, const std::string& q) { s.horizon = get_number(v, q, s.horizon); });
  with(j, "dt", path, [&](const json& v, const std::string& q) { s.dt = get_number(v, q, s.dt); });
  with(j, "settling_band", path, [&](const json& v, const std::string& q) {
    s.settling_band = get_number(v, q, s.settling_band);
  });
  with(j, "reference", path, [&](const json& v, const std::string& q) {
    if (!v.is_string()) fail(q, "expected a string");
    checked(q, [&] { s.reference = reference_mode_from_string(v.get<std::string>()); });
  });
  if (j.contains("name")) {
    if (!j.at("name").is_string() || j.at("name").get<std::string>().empty()) {
      fail(path + ".name", "expected a non-empty string");
    }
    s.name = j.at("name").get<std::string>();
  } else if (noisy) {
    s.name = "noise";
  } else if (s.sprung_mass_scale != 1.0 || s.sprung_mass_override) {
    s.name = "uncertainty";
  } else {
    s.name = index == 0 ? "nominal" : "scenario_" + std::to_string(index);
  }
  checked(path, [&] { s.validate(); });
  return s;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

void RunConfig::set_seed_ensemble(int count) {
  if (count < 1) throw ConfigError("seed_ensemble: must be at least 1");
  seeds.clear();
  for (int i = 0; i < count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
}

void RunConfig::validate() const {
  std::set<std::string> names;
  for (const auto& s : scenarios) {
    if (!names.insert(s.name).second) throw ConfigError("scenarios: duplicate name '" + s.name + "'");
    checked("scenarios." + s.name, [&] { s.validate(); });
  }
  if (scenarios.empty()) throw ConfigError("scenarios: at least one scenario is required");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  for (const auto& e : emit) {
    if (!kAllArtifacts.count(e)) throw ConfigError("emit: unknown artifact '" + e + "'");
  }
  checked("params", [&] { setup.params.validate(); });
  checked("lqr_weights", [&] { setup.weights.validate(); });
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "parse error at line " << line_of(text, e.byte == 0 ? 0 : e.byte - 1) << ": " << e.what();
    throw ConfigError(os.str());
  }
  const std::string root;
  reject_unknown(j, root, {"params", "lqr_weights", "pid", "scenarios", "output_dir", "seeds",
                           "seed_ensemble", "emit", "stability_margin"});
  RunConfig cfg;
  cfg.set_seed_ensemble(20);
  with(j, "params", root, [&](const json& v, const std::string& q) { parse_params(v, q, cfg.setup.params); });
  with(j, "lqr_weights", root,
       [&](const json& v, const std::string& q) { parse_weights(v, q, cfg.setup.weights); });
  with(j, "pid", root, [&](const json& v, const std::string& q) { parse_pid(v, q, cfg.setup.pid); });
  with(j, "scenarios", root, [&](const json& v, const std::string& q) {
    if (!v.is_array() || v.empty()) fail(q, "expected a non-empty array");
    cfg.scenarios.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      cfg.scenarios.push_back(parse_scenario(v[i], q + "[" + std::to_string(i) + "]", i));
    }
  });
  with(j, "output_dir", root, [&](const json& v, const std::string& q) {
    if (!v.is_string()) fail(q, "expected a string");
    cfg.output_dir = v.get<std::string>();
  });
  with(j, "seed_ensemble", root, [&](const json& v, const std::string& q) {
    if (!v.is_number_integer()) fail(q, "expected an integer");
    try {
      cfg.set_seed_ensemble(v.get<int>());
    } catch (const ConfigError&) {
      fail(q, "must be at least 1");
    }
  });
  with(j, "seeds", root, [&](const json& v, const std::string& q) {
    if (!v.is_array() || v.empty()) fail(q, "expected a non-empty array of non-negative integers");
    cfg.seeds.clear();
    for (const auto& s : v) {
      if (!s.is_number_unsigned()) fail(q, "expected non-negative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  });
  with(j, "emit", root, [&](const json& v, const std::string& q) {
    if (!v.is_array()) fail(q, "expected an array of artifact names");
    cfg.emit.clear();
    for (const auto& e : v) {
      if (!e.is_string() || !kAllArtifacts.count(e.get<std::string>())) {
        fail(q, "unknown artifact " + e.dump());
      }
      cfg.emit.insert(e.get<std::string>());
    }
  });
  with(j, "stability_margin", root, [&](const json& v, const std::string& q) {
    cfg.stability_margin = get_number(v, q, 0.0);
  });
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::set<std::string> parse_emit_list(const std::string& csv) {
  std::set<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (!kAllArtifacts.count(item)) throw ConfigError("--emit: unknown artifact '" + item + "'");
    out.insert(item);
  }
  return out;
}

}  // namespace qcar
