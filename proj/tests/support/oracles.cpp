#include "oracles.hpp"

#include <cmath>

namespace gmslam::testing {

using grid::CellIndex;
using match::WindowMatch;

bool offset_before(std::int32_t ax, std::int32_t ay, std::int32_t bx, std::int32_t by) {
  const std::int32_t la = ax * ax + ay * ay, lb = bx * bx + by * by;
  if (la != lb) return la < lb;
  if (ay != by) return ay < by;
  return ax < bx;
}

std::optional<WindowMatch> reference_window_oracle(const Pose2D& pose, const grid::OccupancyGrid& map,
                                                   const Beam& beam, const match::MatchParams& params) {
  const grid::GridParams& g = map.params();
  const double heading = pose.theta + beam.angle;
  const double c = std::cos(heading), s = std::sin(heading);
  const double rm = beam.range - params.pullback;
  const CellIndex hit = grid::world_to_cell(g, pose.x + beam.range * c, pose.y + beam.range * s);
  const CellIndex miss = grid::world_to_cell(g, pose.x + rm * c, pose.y + rm * s);
  auto occupied = [&](CellIndex cell) {
    const float l = map.log_odds(cell);
    return !std::isnan(l) && grid::probability_of(l) > params.occupancy_threshold;
  };
  std::optional<WindowMatch> best;
  const std::int32_t k = params.window_radius;
  for (std::int32_t kx = -k; kx <= k; ++kx)
    for (std::int32_t ky = -k; ky <= k; ++ky) {
      if (!occupied(hit + CellIndex{kx, ky}) || occupied(miss + CellIndex{kx, ky})) continue;
      if (!best || offset_before(kx, ky, best->kx, best->ky)) best = WindowMatch{kx, ky};
    }
  return best;
}

namespace {

std::int64_t round_q16(std::int64_t p) {
  return p >= 0 ? (p + (1 << 15)) >> 16 : -((-p + (1 << 15)) >> 16);
}

}  // namespace

std::optional<WindowMatch> accelerated_window_oracle(const Pose2D& pose, const grid::LocalBinaryMap& map,
                                                     const Beam& beam, const match::MatchParams& params) {
  const match::FixedPose fp = match::FixedPose::from_pose(pose);
  FixedStatus status;
  const FixedQ16 heading = fixed_normalize_angle(
      fixed_add(fp.theta, fixed_normalize_angle(FixedQ16::from_real(beam.angle)), status));
  const auto [s, c] = fixed_sincos(heading);
  const grid::WorldPoint corner = grid::cell_to_world(map.params(), map.corner());
  const std::int64_t bx = std::int64_t{fp.x.raw()} - FixedQ16::from_real(corner.x).raw();
  const std::int64_t by = std::int64_t{fp.y.raw()} - FixedQ16::from_real(corner.y).raw();
  const std::int64_t inv = FixedQ16::from_real(1.0 / map.params().resolution).raw();
  const std::int64_t r = FixedQ16::from_real(beam.range).raw();
  const std::int64_t rm = r - FixedQ16::from_real(params.pullback).raw();
  auto cell = [&](std::int64_t base, std::int64_t range, std::int64_t trig) {
    return round_q16((base + round_q16(range * trig)) * inv) >> 16;
  };
  const std::int64_t hx = cell(bx, r, c.raw()), hy = cell(by, r, s.raw());
  const std::int64_t mx = cell(bx, rm, c.raw()), my = cell(by, rm, s.raw());
  const std::int64_t side = map.side();
  auto inside = [&](std::int64_t x, std::int64_t y) { return x >= 0 && y >= 0 && x < side && y < side; };
  if (!inside(hx, hy) || !inside(mx, my)) return std::nullopt;
  auto bit = [&](std::int64_t x, std::int64_t y) {
    return map.bit(static_cast<std::int32_t>(x - map.half_width()),
                   static_cast<std::int32_t>(y - map.half_width()));
  };
  std::optional<WindowMatch> best;
  const std::int32_t k = params.window_radius;
  for (std::int32_t kx = -k; kx <= k; ++kx)
    for (std::int32_t ky = -k; ky <= k; ++ky) {
      if (!inside(hx + kx, hy + ky) || !inside(mx + kx, my + ky)) continue;
      if (!bit(hx + kx, hy + ky) || bit(mx + kx, my + ky)) continue;
      if (!best || offset_before(kx, ky, best->kx, best->ky)) best = WindowMatch{kx, ky};
    }
  return best;
}

}  // namespace gmslam::testing
