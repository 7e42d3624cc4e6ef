#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "gmslam/dataset/carmen.hpp"
#include "gmslam/rbpf/particle_filter.hpp"

namespace gmslam::app {

/// Bad configuration key or value. Maps to the usage exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw `key = value` settings, before interpretation.
using Settings = std::map<std::string, std::string>;

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// ignored; a repeated key keeps its last value.
Settings parse_settings(std::istream& in);
Settings load_settings(const std::string& path);

/// Keys set in `overrides` replace those in `base`.
Settings merge_settings(Settings base, const Settings& overrides);

struct RunOptions {
  std::string log_path;
  std::string relations_path;
  std::string out_dir = ".";
  rbpf::FilterConfig filter;
  dataset::CarmenOptions carmen;
  bool gating = true;
};

/// Defaults overlaid with `settings`. Throws ConfigError on unknown keys or
/// unparsable values. `resolution` also rescales the resolution-dependent
/// matcher defaults unless those keys are set explicitly.
RunOptions build_run_options(const Settings& settings);

/// Every recognized key, for help output.
const std::map<std::string, std::string>& known_keys();

}  // namespace gmslam::app
