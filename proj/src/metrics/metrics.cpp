#include "gmslam/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace gmslam::metrics {

namespace {

struct Accumulator {
  std::vector<double> trans;
  std::vector<double> rot;

  void add(const Pose2D& err) {
    trans.push_back(err.translation_norm());
    rot.push_back(std::abs(err.theta));
  }
};

// Mean and population standard deviation. Exactly zero spread when all
// samples are equal.
std::pair<double, double> mean_std(const std::vector<double>& v) {
  double sum = 0.0;
  for (const double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }))
    return {v.front(), 0.0};
  double sq = 0.0;
  for (const double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

MetricReport summarize(const Accumulator& acc, std::size_t total) {
  MetricReport r;
  std::tie(r.eps_trans, r.sigma_trans) = mean_std(acc.trans);
  std::tie(r.eps_rot, r.sigma_rot) = mean_std(acc.rot);
  r.relations_used = acc.trans.size();
  r.relations_skipped = total - r.relations_used;
  return r;
}

}  // namespace

void validate_trajectory(const Trajectory& trajectory) {
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (!std::isfinite(trajectory[i].timestamp) || !trajectory[i].pose.is_finite())
      throw MetricError("trajectory contains a non-finite value");
    if (i > 0 && !(trajectory[i].timestamp > trajectory[i - 1].timestamp))
      throw MetricError("trajectory timestamps must be strictly increasing");
  }
}

std::optional<Pose2D> pose_at(const Trajectory& trajectory, double t, double tolerance) {
  if (trajectory.empty()) return std::nullopt;
  const auto it = std::lower_bound(trajectory.begin(), trajectory.end(), t,
                                   [](const TimedPose& p, double v) { return p.timestamp < v; });
  const TimedPose* best = nullptr;
  if (it != trajectory.end()) best = &*it;
  if (it != trajectory.begin()) {
    const TimedPose& before = *std::prev(it);
    if (!best || t - before.timestamp <= best->timestamp - t) best = &before;
  }
  if (std::abs(best->timestamp - t) > tolerance) return std::nullopt;
  return best->pose;
}

MetricReport relation_errors(const Trajectory& trajectory,
                             std::span<const dataset::Relation> relations, double tolerance) {
  if (trajectory.empty()) throw MetricError("trajectory is empty");
  Accumulator acc;
  for (const dataset::Relation& rel : relations) {
    const auto p1 = pose_at(trajectory, rel.t1, tolerance);
    const auto p2 = pose_at(trajectory, rel.t2, tolerance);
    if (!p1 || !p2) continue;
    acc.add(inverse_compose(inverse_compose(*p2, *p1), rel.delta));
  }
  if (acc.trans.empty()) throw MetricError("no relation could be matched to the trajectory");
  return summarize(acc, relations.size());
}

MetricReport trajectory_difference(const Trajectory& a, const Trajectory& b, double tolerance) {
  if (a.size() < 2) throw MetricError("trajectory has fewer than two poses");
  Accumulator acc;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto b0 = pose_at(b, a[i - 1].timestamp, tolerance);
    const auto b1 = pose_at(b, a[i].timestamp, tolerance);
    if (!b0 || !b1) continue;
    const Pose2D da = inverse_compose(a[i].pose, a[i - 1].pose);
    const Pose2D db = inverse_compose(*b1, *b0);
    acc.add(inverse_compose(da, db));
  }
  if (acc.trans.empty()) throw MetricError("trajectories share no aligned pose pairs");
  return summarize(acc, a.size() - 1);
}

std::vector<dataset::Relation> relations_from(const Trajectory& trajectory, std::size_t stride) {
  std::vector<dataset::Relation> out;
  if (stride == 0) stride = 1;
  for (std::size_t i = stride; i < trajectory.size(); ++i) {
    const TimedPose& a = trajectory[i - stride];
    const TimedPose& b = trajectory[i];
    out.push_back({a.timestamp, b.timestamp, inverse_compose(b.pose, a.pose)});
  }
  return out;
}

std::string to_key_value(const MetricReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "eps_trans " << r.eps_trans << '\n'
     << "sigma_trans " << r.sigma_trans << '\n'
     << "eps_rot " << r.eps_rot << '\n'
     << "sigma_rot " << r.sigma_rot << '\n'
     << "relations_used " << r.relations_used << '\n'
     << "relations_skipped " << r.relations_skipped << '\n';
  return os.str();
}

std::string to_json(const MetricReport& r) {
  const nlohmann::json j = {
      {"eps_trans", r.eps_trans},           {"sigma_trans", r.sigma_trans},
      {"eps_rot", r.eps_rot},               {"sigma_rot", r.sigma_rot},
      {"relations_used", r.relations_used}, {"relations_skipped", r.relations_skipped},
  };
  return j.dump(2) + "\n";
}

std::string to_summary(const MetricReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "trans: " << r.eps_trans << " ± " << r.sigma_trans << " m\n";
  os << "rot: " << r.eps_rot << " ± " << r.sigma_rot << " rad\n";
  return os.str();
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const TimedPose& p : trajectory)
    out << p.timestamp << ' ' << p.pose.x << ' ' << p.pose.y << ' ' << p.pose.theta << '\n';
  out.flags(flags);
  out.precision(precision);
}

Trajectory parse_trajectory(std::istream& in) {
  Trajectory out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    double t, x, y, th;
    std::string extra;
    if (!(fields >> t >> x >> y >> th) || (fields >> extra))
      throw MetricError("trajectory line " + std::to_string(number) +
                        ": expected 'timestamp x y theta'");
    out.push_back({t, Pose2D(x, y, th)});
  }
  validate_trajectory(out);
  return out;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MetricError("cannot open trajectory file '" + path + "'");
  return parse_trajectory(in);
}

}  // namespace gmslam::metrics
