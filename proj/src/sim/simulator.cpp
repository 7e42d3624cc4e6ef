#include "gmslam/sim/simulator.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace gmslam::sim {

void World::add_box(double cx, double cy, double half_w, double half_h, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<std::pair<double, double>> corners;
  for (const auto& [dx, dy] : {std::pair{-half_w, -half_h}, std::pair{half_w, -half_h},
                               std::pair{half_w, half_h}, std::pair{-half_w, half_h}})
    corners.emplace_back(cx + c * dx - s * dy, cy + s * dx + c * dy);
  add_polygon(corners);
}

void World::add_polygon(const std::vector<std::pair<double, double>>& corners) {
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const auto& a = corners[i];
    const auto& b = corners[(i + 1) % corners.size()];
    walls.push_back({a.first, a.second, b.first, b.second});
  }
}

World World::rectangular_room(double width, double height) {
  World w;
  w.add_polygon({{0, 0}, {width, 0}, {width, height}, {0, height}});
  return w;
}

World World::furnished_room() {
  World w = rectangular_room(10.0, 8.0);
  w.add_box(5.0, 4.0, 1.0, 0.6);
  w.add_box(0.8, 7.0, 0.4, 0.4);
  w.add_box(9.0, 0.9, 0.35, 0.5, 0.5);
  return w;
}

World World::octagon_room(double radius) {
  World w;
  std::vector<std::pair<double, double>> corners;
  for (int i = 0; i < 8; ++i) {
    const double a = std::numbers::pi / 8.0 + i * std::numbers::pi / 4.0;
    corners.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  w.add_polygon(corners);
  w.add_box(radius * 0.3, -radius * 0.25, 0.5, 0.3, 0.35);
  return w;
}

double ray_cast(const World& world, double x, double y, double angle) {
  const double dx = std::cos(angle), dy = std::sin(angle);
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : world.walls) {
    const double ex = s.x1 - s.x0, ey = s.y1 - s.y0;
    const double denom = dx * ey - dy * ex;
    if (std::abs(denom) < 1e-12) continue;
    const double wx = s.x0 - x, wy = s.y0 - y;
    const double t = (wx * ey - wy * ex) / denom;  // along the ray
    const double u = (wx * dy - wy * dx) / denom;  // along the segment
    if (t > 0.0 && u >= 0.0 && u <= 1.0 && t < best) best = t;
  }
  return best;
}

namespace {

// Ground-truth increments: rotate in place toward each next waypoint, then
// drive straight to it, looping over the waypoint list.
std::vector<Pose2D> plan_increments(const SimConfig& cfg, Pose2D& start) {
  const auto& wp = cfg.waypoints;
  if (wp.size() < 2) throw std::invalid_argument("simulation needs at least two waypoints");
  if (!(cfg.step_length > 0.0) || !(cfg.turn_step > 0.0))
    throw std::invalid_argument("step sizes must be positive");
  start = Pose2D(wp[0].first, wp[0].second,
                 std::atan2(wp[1].second - wp[0].second, wp[1].first - wp[0].first));
  std::vector<Pose2D> out;
  double heading = start.theta;
  std::size_t i = 0;
  while (out.size() + 1 < cfg.steps) {
    const auto& a = wp[i % wp.size()];
    const auto& b = wp[(i + 1) % wp.size()];
    const double want = std::atan2(b.second - a.second, b.first - a.first);
    const double turn = normalize_angle(want - heading);
    if (turn != 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(std::abs(turn) / cfg.turn_step));
      for (std::size_t k = 0; k < n; ++k) out.push_back(Pose2D(0, 0, turn / static_cast<double>(n)));
    }
    heading = want;
    const double len = std::hypot(b.first - a.first, b.second - a.second);
    const auto n = static_cast<std::size_t>(std::ceil(len / cfg.step_length - 1e-9));
    for (std::size_t k = 0; k < n; ++k) out.push_back(Pose2D(len / static_cast<double>(n), 0, 0));
    ++i;
  }
  out.resize(cfg.steps > 0 ? cfg.steps - 1 : 0);
  return out;
}

}  // namespace

SimLog simulate(const SimConfig& cfg) {
  if (cfg.beams < 2) throw std::invalid_argument("simulation needs at least two beams");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  Pose2D truth;
  const std::vector<Pose2D> increments = plan_increments(cfg, truth);
  Pose2D odom = truth;

  SimLog log;
  auto emit = [&](std::size_t step) {
    std::vector<double> ranges(cfg.beams);
    const double first = -cfg.field_of_view / 2.0;
    const double spacing = cfg.field_of_view / static_cast<double>(cfg.beams - 1);
    for (std::size_t b = 0; b < cfg.beams; ++b) {
      const double r = ray_cast(cfg.world, truth.x, truth.y,
                                truth.theta + first + spacing * static_cast<double>(b));
      ranges[b] = r < cfg.range_max ? std::max(0.0, r + unit(rng) * cfg.range_noise) : cfg.range_max;
    }
    const double t = static_cast<double>(step) * cfg.dt;
    dataset::LogEvent ev;
    ev.timestamp = t;
    ev.odom = odom;
    ev.scan = Scan::uniform(ranges, first, cfg.field_of_view, 0.05, cfg.range_max);
    log.events.push_back(std::move(ev));
    log.ground_truth.push_back({t, truth});
    log.odometry.push_back({t, odom});
  };

  if (cfg.steps > 0) emit(0);
  for (std::size_t k = 0; k < increments.size(); ++k) {
    const Pose2D& u = increments[k];
    truth = compose(truth, u);
    const double trans = u.translation_norm(), rot = std::abs(u.theta);
    const double st = cfg.odom_trans_noise * trans + cfg.odom_trans_floor;
    const double sr = cfg.odom_rot_noise * rot + cfg.odom_rot_floor;
    const Pose2D noisy(u.x + unit(rng) * st, u.y + unit(rng) * st, u.theta + unit(rng) * sr);
    odom = compose(odom, noisy);
    emit(k + 1);
  }
  return log;
}

}  // namespace gmslam::sim
