#include "gmslam/app/run_report.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gmslam::app {

void RunReport::add(double timestamp, const rbpf::StepReport& r) {
  Step s;
  s.timestamp = timestamp;
  s.stage_seconds = r.stage_seconds;
  s.score_evaluations = r.score_evaluations;
  s.min_iterations = r.min_iterations;
  s.max_iterations = r.max_iterations;
  s.rejected = r.rejected;
  s.matched = r.matched;
  s.resampled = r.resampled;
  s.effective_sample_size = r.effective_sample_size;
  steps.push_back(s);
  fixed_point_saturated = fixed_point_saturated || r.fixed_point_saturated;
}

std::array<double, rbpf::kStageCount> RunReport::stage_totals() const {
  std::array<double, rbpf::kStageCount> t{};
  for (const Step& s : steps)
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += s.stage_seconds[i];
  return t;
}

std::array<double, rbpf::kStageCount> RunReport::stage_means() const {
  auto t = stage_totals();
  if (!steps.empty())
    for (double& v : t) v /= static_cast<double>(steps.size());
  return t;
}

std::size_t RunReport::resample_count() const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const Step& s) { return s.resampled; }));
}

std::size_t RunReport::rejected_total() const {
  std::size_t n = 0;
  for (const Step& s : steps) n += s.rejected;
  return n;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(9);
  os << "status " << (diverged ? "diverged" : "ok") << '\n';
  os << "backend " << backend << '\n';
  os << "isa " << isa << '\n';
  os << "particles " << particles << '\n';
  os << "threads " << threads << '\n';
  os << "iterations " << iterations() << '\n';
  os << "skipped_events " << skipped_events << '\n';
  os << "total_seconds " << total_seconds << '\n';
  const auto totals = stage_totals();
  const auto means = stage_means();
  for (std::size_t i = 0; i < rbpf::kStageCount; ++i) {
    os << "stage." << rbpf::kStageNames[i] << ".total_seconds " << totals[i] << '\n';
    os << "stage." << rbpf::kStageNames[i] << ".mean_seconds " << means[i] << '\n';
  }
  std::size_t eval_min = std::numeric_limits<std::size_t>::max(), eval_max = 0;
  std::int32_t it_min = std::numeric_limits<std::int32_t>::max(), it_max = 0;
  std::size_t matched_steps = 0;
  for (const Step& s : steps) {
    if (!s.matched) continue;
    ++matched_steps;
    eval_min = std::min(eval_min, s.score_evaluations);
    eval_max = std::max(eval_max, s.score_evaluations);
    it_min = std::min(it_min, s.min_iterations);
    it_max = std::max(it_max, s.max_iterations);
  }
  if (matched_steps == 0) eval_min = 0, it_min = 0;
  os << "matched_iterations " << matched_steps << '\n';
  os << "score_evaluations_per_iteration.min " << eval_min << '\n';
  os << "score_evaluations_per_iteration.max " << eval_max << '\n';
  os << "hill_climb_iterations.min " << it_min << '\n';
  os << "hill_climb_iterations.max " << it_max << '\n';
  os << "resample_count " << resample_count() << '\n';
  os << "rejected_matches " << rejected_total() << '\n';
  os << "fixed_point_saturated " << (fixed_point_saturated ? 1 : 0) << '\n';
  os << "peak_map_bytes " << peak_map_bytes << '\n';
  return os.str();
}

std::string RunReport::steps_table() const {
  std::ostringstream os;
  os << "# step timestamp";
  for (const auto name : rbpf::kStageNames) os << ' ' << name;
  os << " score_evaluations min_iterations max_iterations rejected resampled ess\n";
  os << std::setprecision(9);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& s = steps[i];
    os << i << ' ' << std::fixed << std::setprecision(6) << s.timestamp << std::defaultfloat
       << std::setprecision(9);
    for (const double v : s.stage_seconds) os << ' ' << v;
    os << ' ' << s.score_evaluations << ' ' << s.min_iterations << ' ' << s.max_iterations << ' '
       << s.rejected << ' ' << (s.resampled ? 1 : 0) << ' ' << s.effective_sample_size << '\n';
  }
  return os.str();
}

}  // namespace gmslam::app
