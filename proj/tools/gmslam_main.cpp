// gmslam command-line front end.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gmslam/app/commands.hpp"
#include "gmslam/app/config.hpp"

namespace {

using gmslam::app::Settings;

// Flags shared by `run` and `bench`; each maps to a config key.
struct FilterFlags {
  std::map<std::string, std::string> values;
  std::string config_path;

  void attach(CLI::App& cmd) {
    auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
      cmd.add_option(flag, values[key], help);
    };
    add("--log", "log", "CARMEN log file");
    add("--particles", "particles", "particle count (default 32)");
    add("--backend", "backend", "reference | accelerated (default reference)");
    add("--seed", "seed", "random seed (default 0)");
    add("--resolution", "resolution", "map resolution in meters (default 0.05)");
    add("--local-window", "local_window", "local map half width in cells (default 128)");
    add("--fixed-iterations", "fixed_iterations", "accelerated hill-climb iterations (default 25)");
    add("--threads", "threads", "worker threads (default: all cores)");
    cmd.add_option("--config", config_path, "key = value config file; flags take precedence");
  }

  Settings given(const CLI::App& cmd) const {
    static const std::map<std::string, std::string> flag_of = {
        {"log", "--log"},           {"relations", "--relations"},
        {"out", "--out"},           {"particles", "--particles"},
        {"backend", "--backend"},   {"seed", "--seed"},
        {"resolution", "--resolution"}, {"local_window", "--local-window"},
        {"fixed_iterations", "--fixed-iterations"}, {"threads", "--threads"},
    };
    Settings s;
    for (const auto& [key, value] : values)
      if (cmd.count(flag_of.at(key)) > 0) s[key] = value;
    return s;
  }

  gmslam::app::RunOptions resolve(const CLI::App& cmd) const {
    Settings file;
    if (!config_path.empty()) file = gmslam::app::load_settings(config_path);
    return gmslam::app::build_run_options(gmslam::app::merge_settings(file, given(cmd)));
  }
};

gmslam::app::ReportFormat parse_format(const std::string& f) {
  return f == "json" ? gmslam::app::ReportFormat::kJson : gmslam::app::ReportFormat::kText;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmslam: grid-based RBPF SLAM with reference and fixed-point scan matchers"};
  app.require_subcommand(1);

  FilterFlags run_flags;
  auto* run = app.add_subcommand("run", "run SLAM on a CARMEN log");
  run_flags.attach(*run);
  run->add_option("--relations", run_flags.values["relations"], "ground-truth relations file");
  run->add_option("--out", run_flags.values["out"], "output directory (default .)");

  std::string traj, rel, traj_b, format = "text";
  double tolerance = gmslam::metrics::kDefaultTolerance;
  auto* evaluate = app.add_subcommand("evaluate", "score a trajectory against relations");
  evaluate->add_option("--trajectory", traj, "trajectory file")->required();
  evaluate->add_option("--relations", rel, "relations file")->required();
  evaluate->add_option("--tolerance", tolerance, "timestamp matching tolerance in seconds");
  evaluate->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

  auto* compare = app.add_subcommand("compare", "relative-motion difference of two trajectories");
  compare->add_option("--a", traj, "first trajectory")->required();
  compare->add_option("--b", traj_b, "second trajectory")->required();
  compare->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

  FilterFlags bench_flags;
  std::vector<std::size_t> counts = {16, 32, 64};
  std::vector<std::string> backends = {"reference", "accelerated"};
  std::vector<std::size_t> thread_counts;
  std::size_t reps = 1;
  auto* bench = app.add_subcommand("bench", "per-stage latency table over particle counts");
  bench_flags.attach(*bench);
  bench->add_option("--counts", counts, "particle counts")->delimiter(',');
  bench->add_option("--backends", backends, "backends")
      ->delimiter(',')
      ->check(CLI::IsMember({"reference", "accelerated"}));
  bench->add_option("--thread-counts", thread_counts, "thread counts to compare")->delimiter(',');
  bench->add_option("--repetitions", reps, "runs per configuration");

  gmslam::app::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic CARMEN log with ground truth");
  simulate->add_option("--out", sim.out_dir, "output directory");
  simulate->add_option("--steps", sim.steps, "number of scans");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--world", sim.world, "furnished | rectangle | octagon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmslam::app::kExitUsage;
  }

  try {
    if (*run) return gmslam::app::cmd_run(run_flags.resolve(*run), std::cout, std::cerr);
    if (*evaluate)
      return gmslam::app::cmd_evaluate(traj, rel, tolerance, parse_format(format), std::cout,
                                       std::cerr);
    if (*compare)
      return gmslam::app::cmd_compare(traj, traj_b, parse_format(format), std::cout, std::cerr);
    if (*bench) {
      gmslam::app::BenchOptions opts;
      opts.base = bench_flags.resolve(*bench);
      opts.particle_counts = counts;
      opts.backends.clear();
      for (const auto& b : backends)
        opts.backends.push_back(b == "accelerated" ? gmslam::match::Backend::kAccelerated
                                                   : gmslam::match::Backend::kReference);
      opts.thread_counts =
          thread_counts.empty() ? std::vector<std::size_t>{opts.base.filter.threads} : thread_counts;
      opts.repetitions = reps;
      return gmslam::app::cmd_bench(opts, std::cout, std::cerr);
    }
    if (*simulate) return gmslam::app::cmd_simulate(sim, std::cout, std::cerr);
  } catch (const gmslam::app::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gmslam::app::kExitUsage;
  }
  return gmslam::app::kExitUsage;
}
