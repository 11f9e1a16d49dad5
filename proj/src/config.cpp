#include "tco/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace tco {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("key '" + key + "': expected a number, got '" + std::string(v) + "'");
  return out;
}

template <typename Int>
Int to_integer(const std::string& key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + std::string(v) + "'");
}

std::vector<std::int64_t> to_int_list(const std::string& key, std::string_view v) {
  std::vector<std::int64_t> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_integer<std::int64_t>(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key real_key(std::string name, std::function<double&(RunConfig&)> field) {
  return {std::move(name),
          [field](RunConfig& c, const std::string& k, std::string_view v) {
            field(c) = to_double(k, v);
          },
          [field](const RunConfig& c) { return format_double(field(const_cast<RunConfig&>(c))); }};
}

Key int_key(std::string name, std::function<std::int64_t&(RunConfig&)> field) {
  return {std::move(name),
          [field](RunConfig& c, const std::string& k, std::string_view v) {
            field(c) = to_integer<std::int64_t>(k, v);
          },
          [field](const RunConfig& c) {
            return std::to_string(field(const_cast<RunConfig&>(c)));
          }};
}

Key schedule_key(std::string name, int which) {
  return {std::move(name),
          [which](RunConfig& c, const std::string& k, std::string_view v) {
            const GainSchedule& s = c.scenario.schedule;
            double f[5] = {s.a(), s.c(), s.A(), s.alpha(), s.gamma()};
            f[which] = to_double(k, v);
            try {
              c.scenario.schedule = GainSchedule(f[0], f[1], f[2], f[3], f[4]);
            } catch (const std::invalid_argument& e) {
              throw ConfigError(e.what());
            }
          },
          [which](const RunConfig& c) {
            const GainSchedule& s = c.scenario.schedule;
            const double f[5] = {s.a(), s.c(), s.A(), s.alpha(), s.gamma()};
            return format_double(f[which]);
          }};
}

std::vector<Key> table_keys() {
  std::vector<Key> keys;
  for (int i = 0; i < kComponentCount; ++i) {
    const auto c = static_cast<Component>(i);
    keys.push_back(real_key("table.x_" + std::string(kComponentNames[i]),
                            [c](RunConfig& r) -> double& { return r.scenario.table[c]; }));
  }
  return keys;
}

std::vector<Key> other_keys() {
  std::vector<Key> keys;
  const auto param = [&](const char* name, double CostModelParams<double>::*field) {
    keys.push_back(real_key(std::string("params.") + name,
                            [field](RunConfig& r) -> double& { return r.scenario.params.*field; }));
  };
  param("y_stb", &CostModelParams<double>::y_stb);
  param("y_mdm", &CostModelParams<double>::y_mdm);
  param("z_stb", &CostModelParams<double>::z_stb);
  param("z_mdm", &CostModelParams<double>::z_mdm);
  param("y_instr", &CostModelParams<double>::y_instr);
  param("z_instr", &CostModelParams<double>::z_instr);
  param("u_instr", &CostModelParams<double>::u_instr);
  param("p_instr", &CostModelParams<double>::p_instr);
  param("q_instr", &CostModelParams<double>::q_instr);
  param("s_instr", &CostModelParams<double>::s_instr);
  param("v_instr", &CostModelParams<double>::v_instr);
  param("w_instr", &CostModelParams<double>::w_instr);
  for (int i = 0; i < kDeviceCount; ++i) {
    const std::string dev(kComponentNames[i]);
    keys.push_back(real_key("params.e0." + dev,
                            [i](RunConfig& r) -> double& { return r.scenario.params.e0(i); }));
    keys.push_back(real_key("params.e1." + dev,
                            [i](RunConfig& r) -> double& { return r.scenario.params.e1(i); }));
  }
  keys.push_back(int_key("params.tau", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.params.tau;
  }));
  keys.push_back(int_key("params.msrvr_count", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.params.msrvr_count;
  }));

  for (int i = 0; i < kTermCount; ++i)
    keys.push_back(real_key("noise.sd." + std::string(kTermNames[i]),
                            [i](RunConfig& r) -> double& { return r.scenario.spec.sd(i); }));
  keys.push_back(real_key("noise.scale", [](RunConfig& r) -> double& { return r.noise_scale; }));
  keys.push_back({"noise.seed",
                  [](RunConfig& c, const std::string& k, std::string_view v) {
                    c.scenario.spec.seed = to_integer<std::uint64_t>(k, v);
                  },
                  [](const RunConfig& c) { return std::to_string(c.scenario.spec.seed); }});
  keys.push_back({"noise.resample",
                  [](RunConfig& c, const std::string&, std::string_view v) {
                    c.scenario.spec.resample = parse_resample_policy(v);
                  },
                  [](const RunConfig& c) { return std::string(to_string(c.scenario.spec.resample)); }});
  keys.push_back({"noise.probes",
                  [](RunConfig& c, const std::string&, std::string_view v) {
                    c.scenario.spec.pairing = parse_probe_pairing(v);
                  },
                  [](const RunConfig& c) { return std::string(to_string(c.scenario.spec.pairing)); }});

  const char* schedule_names[5] = {"a", "c", "A", "alpha", "gamma"};
  for (int i = 0; i < 5; ++i)
    keys.push_back(schedule_key(std::string("schedule.") + schedule_names[i], i));

  keys.push_back(real_key("optimizer.m0", [](RunConfig& r) -> double& {
    return r.scenario.optimizer.m0;
  }));
  keys.push_back(int_key("optimizer.max_iters", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.optimizer.max_iters;
  }));
  keys.push_back(real_key("optimizer.tolerance", [](RunConfig& r) -> double& {
    return r.scenario.optimizer.tolerance;
  }));
  keys.push_back(int_key("optimizer.patience", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.optimizer.patience;
  }));
  keys.push_back({"optimizer.early_stop",
                  [](RunConfig& c, const std::string& k, std::string_view v) {
                    c.scenario.optimizer.early_stop = to_bool(k, v);
                  },
                  [](const RunConfig& c) {
                    return std::string(c.scenario.optimizer.early_stop ? "true" : "false");
                  }});

  keys.push_back(real_key("scenario.horizon_years", [](RunConfig& r) -> double& {
    return r.scenario.horizon_years;
  }));
  keys.push_back(real_key("scenario.time_step", [](RunConfig& r) -> double& {
    return r.scenario.time_step;
  }));
  keys.push_back(real_key("scenario.average_window", [](RunConfig& r) -> double& {
    return r.scenario.average_window;
  }));
  keys.push_back({"scenario.populations",
                  [](RunConfig& c, const std::string& k, std::string_view v) {
                    c.scenario.populations = to_int_list(k, v);
                  },
                  [](const RunConfig& c) {
                    std::string s;
                    for (auto n : c.scenario.populations)
                      s += (s.empty() ? "" : ",") + std::to_string(n);
                    return s;
                  }});
  keys.push_back(int_key("scenario.m_min", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.m_min;
  }));
  keys.push_back(int_key("scenario.m_max", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.m_max;
  }));
  keys.push_back({"scenario.growth",
                  [](RunConfig& c, const std::string&, std::string_view v) {
                    c.scenario.growth.kind = parse_growth_kind(v);
                  },
                  [](const RunConfig& c) { return std::string(to_string(c.scenario.growth.kind)); }});
  keys.push_back(real_key("scenario.growth.n0", [](RunConfig& r) -> double& {
    return r.scenario.growth.n0;
  }));
  keys.push_back(real_key("scenario.growth.rate", [](RunConfig& r) -> double& {
    return r.scenario.growth.rate;
  }));
  keys.push_back(real_key("scenario.growth.capacity", [](RunConfig& r) -> double& {
    return r.scenario.growth.capacity;
  }));
  keys.push_back({"scenario.warm_start",
                  [](RunConfig& c, const std::string& k, std::string_view v) {
                    c.scenario.warm_start = to_bool(k, v);
                  },
                  [](const RunConfig& c) {
                    return std::string(c.scenario.warm_start ? "true" : "false");
                  }});
  keys.push_back(int_key("scenario.replications", [](RunConfig& r) -> std::int64_t& {
    return r.scenario.replications;
  }));
  keys.push_back(int_key("scenario.sweep_time.n", [](RunConfig& r) -> std::int64_t& {
    return r.sweep_time_n;
  }));
  keys.push_back(real_key("scenario.sweep_time.m", [](RunConfig& r) -> double& {
    return r.sweep_time_m;
  }));
  keys.push_back(real_key("scenario.sweep_servers.t", [](RunConfig& r) -> double& {
    return r.sweep_servers_t;
  }));

  keys.push_back(int_key("point.n", [](RunConfig& r) -> std::int64_t& { return r.point_n; }));
  keys.push_back(real_key("point.m", [](RunConfig& r) -> double& { return r.point_m; }));
  keys.push_back(real_key("point.t", [](RunConfig& r) -> double& { return r.point_t; }));
  return keys;
}

}  // namespace

PerturbationSpec RunConfig::effective_spec() const {
  PerturbationSpec spec = scenario.spec;
  spec.sd *= noise_scale;
  return spec;
}

ScenarioConfig RunConfig::effective_scenario() const {
  ScenarioConfig out = scenario;
  out.spec = effective_spec();
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }
  return out;
}

RunConfig build_config(const std::map<std::string, std::string>& kv) {
  static const std::vector<Key> table = table_keys();
  static const std::vector<Key> others = other_keys();

  std::map<std::string, const Key*> index;
  for (const auto& k : table) index[k.name] = &k;
  for (const auto& k : others) index[k.name] = &k;
  for (const auto& [key, value] : kv)
    if (!index.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  RunConfig config;
  try {
    for (const auto& k : table)
      if (auto it = kv.find(k.name); it != kv.end()) k.set(config, it->first, it->second);
    config.scenario.table.validate();
    const std::uint64_t seed = config.scenario.spec.seed;
    config.scenario.params = CostModelParams<double>::defaults(config.scenario.table);
    config.scenario.spec = PerturbationSpec::defaults(config.scenario.table, seed);
    for (const auto& k : others)
      if (auto it = kv.find(k.name); it != kv.end()) k.set(config, it->first, it->second);
    if (!(config.noise_scale >= 0.0)) throw ConfigError("noise.scale must be nonnegative");
    config.effective_scenario().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_config(parse_key_values(buf.str()));
}

std::string dump_config(const RunConfig& config) {
  static const std::vector<Key> table = table_keys();
  static const std::vector<Key> others = other_keys();
  std::string out;
  for (const auto* keys : {&table, &others})
    for (const auto& k : *keys) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace tco
