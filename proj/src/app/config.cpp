#include "gmslam/app/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

namespace gmslam::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("invalid value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid value '" + value + "' for " + key);
}

}  // namespace

const std::map<std::string, std::string>& known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"log", "CARMEN log path"},
      {"relations", "ground-truth relations path"},
      {"out", "output directory"},
      {"particles", "particle count M"},
      {"backend", "reference | accelerated"},
      {"seed", "random seed"},
      {"resolution", "map cell size in meters"},
      {"local_window", "local map half width W in cells"},
      {"fixed_iterations", "accelerated hill-climb iterations"},
      {"max_iterations", "reference hill-climb iteration cap"},
      {"threads", "worker threads, 0 for all cores"},
      {"resample_fraction", "resample when ESS < fraction * M"},
      {"window_radius", "matching window radius K"},
      {"sigma", "matching score sigma in meters"},
      {"pullback", "pullback distance in meters"},
      {"occupancy_threshold", "occupied-cell probability threshold"},
      {"convergence_step", "reference convergence step in meters"},
      {"linear_step", "initial hill-climb linear step in meters"},
      {"angular_step", "initial hill-climb angular step in radians"},
      {"min_match_fraction", "matched-beam fraction below which a match is rejected"},
      {"motion_a1", "translation noise per meter"},
      {"motion_a2", "translation noise per radian"},
      {"motion_a3", "rotation noise per radian"},
      {"motion_a4", "rotation noise per meter"},
      {"linear_threshold", "process a scan after this much travel, meters"},
      {"angular_threshold", "process a scan after this much rotation, radians"},
      {"gating", "skip scans below the motion thresholds"},
      {"field_of_view", "laser field of view in radians"},
      {"range_min", "shortest valid range in meters"},
      {"range_max", "longest valid range in meters"},
      {"sensor_offset_x", "laser x in the robot frame"},
      {"sensor_offset_y", "laser y in the robot frame"},
      {"sensor_offset_theta", "laser heading in the robot frame"},
      {"strict", "abort on malformed log lines"},
  };
  return keys;
}

Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(number) + ": empty key");
    out[key] = value;
  }
  return out;
}

Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_settings(in);
}

Settings merge_settings(Settings base, const Settings& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

RunOptions build_run_options(const Settings& settings) {
  for (const auto& [k, v] : settings)
    if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");

  auto get = [&](const char* key) -> const std::string* {
    const auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };
  auto real = [&](const char* key, double& dst) {
    if (const auto* v = get(key)) dst = parse_number<double>(key, *v);
  };

  RunOptions o;
  rbpf::FilterConfig& f = o.filter;
  if (const auto* v = get("log")) o.log_path = *v;
  if (const auto* v = get("relations")) o.relations_path = *v;
  if (const auto* v = get("out")) o.out_dir = *v;

  real("resolution", f.grid.resolution);
  if (!(f.grid.resolution > 0.0)) throw ConfigError("resolution must be positive");
  f.match = match::MatchParams::for_resolution(f.grid.resolution);

  if (const auto* v = get("particles")) f.particles = parse_number<std::size_t>("particles", *v);
  if (const auto* v = get("backend")) {
    if (*v == "reference") f.backend = match::Backend::kReference;
    else if (*v == "accelerated") f.backend = match::Backend::kAccelerated;
    else throw ConfigError("backend must be 'reference' or 'accelerated'");
  }
  if (const auto* v = get("seed")) f.seed = parse_number<std::uint64_t>("seed", *v);
  if (const auto* v = get("local_window"))
    f.local_window = parse_number<std::int32_t>("local_window", *v);
  if (const auto* v = get("fixed_iterations"))
    f.match.fixed_iterations = parse_number<std::int32_t>("fixed_iterations", *v);
  if (const auto* v = get("max_iterations"))
    f.match.max_iterations = parse_number<std::int32_t>("max_iterations", *v);
  if (const auto* v = get("window_radius"))
    f.match.window_radius = parse_number<std::int32_t>("window_radius", *v);
  if (const auto* v = get("threads")) f.threads = parse_number<std::size_t>("threads", *v);
  real("resample_fraction", f.resample_fraction);
  real("sigma", f.match.sigma);
  real("pullback", f.match.pullback);
  real("occupancy_threshold", f.match.occupancy_threshold);
  real("convergence_step", f.match.convergence_step);
  real("linear_step", f.match.initial_linear_step);
  real("angular_step", f.match.initial_angular_step);
  real("min_match_fraction", f.min_match_fraction);
  real("motion_a1", f.motion.a1);
  real("motion_a2", f.motion.a2);
  real("motion_a3", f.motion.a3);
  real("motion_a4", f.motion.a4);
  real("linear_threshold", f.gating.linear);
  real("angular_threshold", f.gating.angular);
  if (const auto* v = get("gating")) o.gating = parse_bool("gating", *v);
  real("field_of_view", o.carmen.field_of_view);
  real("range_min", o.carmen.range_min);
  real("range_max", o.carmen.range_max);
  if (const auto* v = get("strict")) o.carmen.strict = parse_bool("strict", *v);
  double sx = 0, sy = 0, st = 0;
  real("sensor_offset_x", sx);
  real("sensor_offset_y", sy);
  real("sensor_offset_theta", st);
  f.sensor_offset = Pose2D(sx, sy, st);

  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(o.carmen.field_of_view > 0.0) || !(o.carmen.range_min >= 0.0) ||
      !(o.carmen.range_max > o.carmen.range_min))
    throw ConfigError("invalid laser field of view or range bounds");
  return o;
}

}  // namespace gmslam::app
