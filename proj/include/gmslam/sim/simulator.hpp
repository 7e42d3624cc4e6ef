#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "gmslam/dataset/carmen.hpp"
#include "gmslam/dataset/relations.hpp"
#include "gmslam/geometry/pose.hpp"
#include "gmslam/metrics/metrics.hpp"

namespace gmslam::sim {

struct Segment {
  double x0, y0, x1, y1;
};

/// Planar world made of wall segments.
struct World {
  std::vector<Segment> walls;

  void add_box(double cx, double cy, double half_w, double half_h, double angle = 0.0);
  void add_polygon(const std::vector<std::pair<double, double>>& corners);

  /// Walls of a w x h rectangle with its lower-left corner at the origin.
  static World rectangular_room(double width, double height);
  /// 10 x 8 m room with three boxes, one of them rotated.
  static World furnished_room();
  /// Regular octagon of the given circumradius centered at the origin, plus
  /// a rotated box inside.
  static World octagon_room(double radius);
};

/// Distance along the ray to the nearest wall, or +inf.
double ray_cast(const World& world, double x, double y, double angle);

struct SimConfig {
  World world = World::furnished_room();
  std::vector<std::pair<double, double>> waypoints = {{2, 2}, {8, 2}, {8, 6}, {2, 6}};
  std::size_t steps = 200;
  double step_length = 0.15;  // meters per translation step
  double turn_step = 0.2;     // radians per rotation step
  double dt = 0.25;           // seconds between scans
  std::size_t beams = 181;
  double field_of_view = std::numbers::pi;
  double range_max = 20.0;
  double range_noise = 0.01;  // meters
  // Odometry increment noise: sigma = k * |component| + floor.
  double odom_trans_noise = 0.03;
  double odom_rot_noise = 0.03;
  double odom_trans_floor = 0.002;
  double odom_rot_floor = 0.002;
  std::uint64_t seed = 1;
};

struct SimLog {
  std::vector<dataset::LogEvent> events;  // one FLASER event per step
  metrics::Trajectory ground_truth;
  metrics::Trajectory odometry;
};

/// Drives the waypoint loop (rotating in place at each corner), ray casting a
/// scan at every step and integrating noisy odometry. The robot starts at
/// the first waypoint facing the second.
SimLog simulate(const SimConfig& config);

}  // namespace gmslam::sim
