#include "gmslam/match/scan_matcher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace gmslam::match {

MatchParams MatchParams::for_resolution(double resolution) {
  MatchParams p;
  p.pullback = std::sqrt(2.0) * resolution;
  p.sigma = resolution;
  p.convergence_step = resolution / 8.0;
  return p;
}

void MatchParams::validate() const {
  if (window_radius < 1) throw std::invalid_argument("window radius K must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(pullback > 0.0)) throw std::invalid_argument("pullback distance must be positive");
  if (!(occupancy_threshold > 0.0 && occupancy_threshold < 1.0))
    throw std::invalid_argument("occupancy threshold must lie in (0, 1)");
  if (fixed_iterations < 1) throw std::invalid_argument("fixed iteration count must be >= 1");
  if (max_iterations < 0) throw std::invalid_argument("max iterations must be >= 0");
  if (!(initial_linear_step > 0.0) || !(initial_angular_step > 0.0))
    throw std::invalid_argument("initial steps must be positive");
  if (!(no_match_likelihood > 0.0 && no_match_likelihood <= 1.0))
    throw std::invalid_argument("no-match likelihood must lie in (0, 1]");
}

std::vector<kernels::WindowOffset> window_search_order(std::int32_t radius) {
  std::vector<kernels::WindowOffset> order;
  for (std::int32_t ky = -radius; ky <= radius; ++ky)
    for (std::int32_t kx = -radius; kx <= radius; ++kx) order.push_back({kx, ky});
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.kx * a.kx + a.ky * a.ky < b.kx * b.kx + b.ky * b.ky;
  });
  return order;
}

FixedPose FixedPose::from_pose(const Pose2D& p) {
  return {FixedQ16::from_real(p.x), FixedQ16::from_real(p.y),
          fixed_normalize_angle(FixedQ16::from_real(p.theta))};
}

Pose2D FixedPose::to_pose() const { return {x.to_real(), y.to_real(), theta.to_real()}; }

grid::WorldPoint project_beam(const Pose2D& pose, const Beam& beam) {
  const double heading = pose.theta + beam.angle;
  return {pose.x + beam.range * std::cos(heading), pose.y + beam.range * std::sin(heading)};
}

std::pair<FixedQ16, FixedQ16> project_beam_q16(const FixedPose& pose, const Beam& beam,
                                               FixedStatus& status) {
  const FixedQ16 heading = fixed_normalize_angle(
      fixed_add(pose.theta, fixed_normalize_angle(FixedQ16::from_real(beam.angle)), status));
  const auto [s, c] = fixed_sincos(heading);
  const FixedQ16 r = FixedQ16::from_real(beam.range);
  return {fixed_add(pose.x, fixed_mul(r, c, status), status),
          fixed_add(pose.y, fixed_mul(r, s, status), status)};
}

BeamCellPair beam_cells(const Pose2D& pose, const Beam& beam, const grid::GridParams& params,
                        double pullback) {
  const grid::WorldPoint hit = project_beam(pose, beam);
  const grid::WorldPoint miss = project_beam(pose, Beam{beam.range - pullback, beam.angle});
  return {grid::world_to_cell(params, hit.x, hit.y), grid::world_to_cell(params, miss.x, miss.y)};
}

// ---------------------------------------------------------------------------
// Reference backend

ReferenceMatcher::ReferenceMatcher(const grid::OccupancyGrid& map, const Scan& scan,
                                   const MatchParams& params)
    : map_(map),
      params_(params),
      threshold_(params.occupancy_threshold),
      order_(window_search_order(params.window_radius)),
      gaussian_scale_(map.params().resolution * map.params().resolution /
                      (2.0 * params.sigma * params.sigma)),
      log_floor_(std::log(params.no_match_likelihood)) {
  params_.validate();
  for (const Beam& b : scan.beams) {
    if (!scan.is_valid(b)) continue;
    ranges_.push_back(b.range);
    angles_.push_back(b.angle);
  }
  cos_.resize(ranges_.size());
  sin_.resize(ranges_.size());
}

void ReferenceMatcher::update_trig(double theta) {
  if (trig_theta_ && *trig_theta_ == theta) return;
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double heading = theta + angles_[i];
    cos_[i] = std::cos(heading);
    sin_[i] = std::sin(heading);
  }
  trig_theta_ = theta;
}

std::optional<WindowMatch> ReferenceMatcher::match_beam(const Pose2D& pose, std::size_t i) {
  update_trig(pose.theta);
  const grid::GridParams& gp = map_.params();
  const double r = ranges_[i];
  const double rm = r - params_.pullback;
  const grid::CellIndex hit =
      grid::world_to_cell(gp, pose.x + r * cos_[i], pose.y + r * sin_[i]);
  const grid::CellIndex miss =
      grid::world_to_cell(gp, pose.x + rm * cos_[i], pose.y + rm * sin_[i]);
  for (const auto& k : order_) {
    const grid::CellIndex off{k.kx, k.ky};
    if (threshold_.occupied(map_.log_odds(hit + off)) &&
        !threshold_.occupied(map_.log_odds(miss + off)))
      return WindowMatch{k.kx, k.ky};
  }
  return std::nullopt;
}

ReferenceMatcher::Evaluation ReferenceMatcher::evaluate(const Pose2D& pose) {
  Evaluation e;
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const auto m = match_beam(pose, i);
    if (!m) {
      e.log_likelihood += log_floor_;
      continue;
    }
    const double exponent = -static_cast<double>(m->squared_length()) * gaussian_scale_;
    e.score += std::exp(exponent);
    e.log_likelihood += exponent;
    ++e.matched;
  }
  return e;
}

MatchResult ReferenceMatcher::hill_climb(const Pose2D& initial) {
  MatchResult result;
  result.valid_beams = valid_beams();
  Pose2D best = initial;
  Evaluation best_eval = evaluate(best);
  result.score_evaluations = 1;

  double lin = params_.initial_linear_step;
  double ang = params_.initial_angular_step;
  std::int32_t iterations = 0;
  while (iterations < params_.max_iterations && lin >= params_.convergence_step) {
    ++iterations;
    const std::array<Pose2D, 6> candidates{
        Pose2D{best.x + lin, best.y, best.theta}, Pose2D{best.x - lin, best.y, best.theta},
        Pose2D{best.x, best.y + lin, best.theta}, Pose2D{best.x, best.y - lin, best.theta},
        Pose2D{best.x, best.y, best.theta + ang}, Pose2D{best.x, best.y, best.theta - ang}};
    std::size_t pick = 0;
    Evaluation pick_eval = evaluate(candidates[0]);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const Evaluation e = evaluate(candidates[c]);
      if (e.score > pick_eval.score) {
        pick = c;
        pick_eval = e;
      }
    }
    result.score_evaluations += candidates.size();
    if (pick_eval.score > best_eval.score) {
      best = candidates[pick];
      best_eval = pick_eval;
    } else {
      lin *= 0.5;
      ang *= 0.5;
    }
  }

  result.pose = best;
  result.score = best_eval.score;
  result.matched_beams = best_eval.matched;
  result.log_likelihood = best_eval.log_likelihood;
  result.iterations_used = iterations;
  return result;
}

// ---------------------------------------------------------------------------
// Accelerated backend

AcceleratedMatcher::AcceleratedMatcher(const grid::LocalBinaryMap& map, const Scan& scan,
                                       const MatchParams& params)
    : map_(map),
      params_(params),
      lut_(params.window_radius, map.params().resolution, params.sigma),
      order_(window_search_order(params.window_radius)),
      log_floor_(std::log(params.no_match_likelihood)) {
  params_.validate();
  for (const auto& k : order_) {
    order_score_.push_back(lut_.at(k.kx, k.ky));
    order_log_score_.push_back(lut_.log_at(k.kx, k.ky));
  }
  const grid::WorldPoint corner = grid::cell_to_world(map.params(), map.corner());
  corner_x_ = FixedQ16::from_real(corner.x);
  corner_y_ = FixedQ16::from_real(corner.y);
  inv_resolution_ = FixedQ16::from_real(1.0 / map.params().resolution);
  const FixedQ16 pullback = FixedQ16::from_real(params.pullback);
  for (const Beam& b : scan.beams) {
    if (!scan.is_valid(b)) continue;
    const FixedQ16 r = FixedQ16::from_real(b.range);
    range_raw_.push_back(r.raw());
    pullback_raw_.push_back(fixed_sub(r, pullback, status_).raw());
    angle_raw_.push_back(fixed_normalize_angle(FixedQ16::from_real(b.angle)).raw());
  }
  const std::size_t n = range_raw_.size();
  cos_raw_.resize(n);
  sin_raw_.resize(n);
  hit_x_.resize(n);
  hit_y_.resize(n);
  miss_x_.resize(n);
  miss_y_.resize(n);
  match_index_.resize(n);
}

void AcceleratedMatcher::update_trig(FixedQ16 theta) {
  if (trig_theta_ && *trig_theta_ == theta) return;
  for (std::size_t i = 0; i < angle_raw_.size(); ++i) {
    const FixedQ16 heading =
        fixed_normalize_angle(fixed_add(theta, FixedQ16::from_raw(angle_raw_[i]), status_));
    const auto [s, c] = fixed_sincos(heading);
    sin_raw_[i] = s.raw();
    cos_raw_[i] = c.raw();
  }
  trig_theta_ = theta;
}

AcceleratedMatcher::Evaluation AcceleratedMatcher::evaluate(const FixedPose& pose) {
  update_trig(pose.theta);
  const kernels::FixedProjection proj{fixed_sub(pose.x, corner_x_, status_),
                                      fixed_sub(pose.y, corner_y_, status_), inv_resolution_};
  kernels::project_cells_q16(proj, {cos_raw_, sin_raw_, range_raw_, pullback_raw_},
                             {hit_x_, hit_y_, miss_x_, miss_y_}, status_);
  kernels::window_search(map_.plane(), {hit_x_, hit_y_, miss_x_, miss_y_}, order_, match_index_);

  Evaluation e;
  for (const std::int16_t j : match_index_) {
    if (j < 0) {
      e.log_likelihood += log_floor_;
      continue;
    }
    const auto idx = static_cast<std::size_t>(j);
    e.score += order_score_[idx];
    e.log_likelihood += order_log_score_[idx];
    ++e.matched;
  }
  return e;
}

MatchResult AcceleratedMatcher::hill_climb(const Pose2D& initial) {
  if (!map_.contains(grid::world_to_cell(map_.params(), initial.x, initial.y)))
    throw std::invalid_argument("initial pose lies outside the local map");

  MatchResult result;
  result.valid_beams = valid_beams();
  FixedPose best = FixedPose::from_pose(initial);
  Evaluation best_eval = evaluate(best);
  result.score_evaluations = 1;

  const FixedQ16 half = FixedQ16::from_raw(static_cast<std::int32_t>(FixedQ16::kOne / 2));
  FixedQ16 lin = FixedQ16::from_real(params_.initial_linear_step);
  FixedQ16 ang = FixedQ16::from_real(params_.initial_angular_step);
  for (std::int32_t it = 0; it < params_.fixed_iterations; ++it) {
    const auto turn = [&](FixedQ16 delta) {
      return fixed_normalize_angle(fixed_add(best.theta, delta, status_));
    };
    const std::array<FixedPose, 6> candidates{
        FixedPose{fixed_add(best.x, lin, status_), best.y, best.theta},
        FixedPose{fixed_sub(best.x, lin, status_), best.y, best.theta},
        FixedPose{best.x, fixed_add(best.y, lin, status_), best.theta},
        FixedPose{best.x, fixed_sub(best.y, lin, status_), best.theta},
        FixedPose{best.x, best.y, turn(ang)},
        FixedPose{best.x, best.y, turn(FixedQ16::from_raw(-ang.raw()))}};
    std::size_t pick = 0;
    Evaluation pick_eval = evaluate(candidates[0]);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const Evaluation e = evaluate(candidates[c]);
      if (e.score > pick_eval.score) {
        pick = c;
        pick_eval = e;
      }
    }
    result.score_evaluations += candidates.size();
    if (pick_eval.score > best_eval.score) {
      best = candidates[pick];
      best_eval = pick_eval;
    } else {
      lin = fixed_mul(lin, half, status_);
      ang = fixed_mul(ang, half, status_);
    }
  }

  result.pose = best.to_pose();
  result.score = best_eval.score;
  result.matched_beams = best_eval.matched;
  result.log_likelihood = best_eval.log_likelihood;
  result.iterations_used = params_.fixed_iterations;
  return result;
}

// ---------------------------------------------------------------------------
// Free-function entry points

namespace {

Scan single_beam(const Beam& beam) {
  Scan s;
  s.range_min = 0.0;
  s.range_max = std::numeric_limits<double>::infinity();
  s.beams.push_back(beam);
  return s;
}

}  // namespace

std::optional<WindowMatch> find_min_distance(const Pose2D& pose, const grid::OccupancyGrid& map,
                                             const Beam& beam, const MatchParams& params) {
  if (!(beam.range > 0.0)) return std::nullopt;
  ReferenceMatcher matcher(map, single_beam(beam), params);
  return matcher.match_beam(pose, 0);
}

std::optional<WindowMatch> find_min_distance(const Pose2D& pose, const grid::LocalBinaryMap& map,
                                             const Beam& beam, const MatchParams& params) {
  if (!(beam.range > 0.0)) return std::nullopt;
  AcceleratedMatcher matcher(map, single_beam(beam), params);
  matcher.evaluate(FixedPose::from_pose(pose));
  const std::int16_t j = matcher.last_matches()[0];
  if (j < 0) return std::nullopt;
  const auto& k = matcher.order()[static_cast<std::size_t>(j)];
  return WindowMatch{k.kx, k.ky};
}

ScoreResult score(const Pose2D& pose, const grid::OccupancyGrid& map, const Scan& scan,
                  const MatchParams& params, const ScoreLUT& /*lut*/) {
  ReferenceMatcher matcher(map, scan, params);
  const auto e = matcher.evaluate(pose);
  return {e.score, e.matched};
}

ScoreResult score(const Pose2D& pose, const grid::LocalBinaryMap& map, const Scan& scan,
                  const MatchParams& params, const ScoreLUT& lut) {
  if (lut.radius() != params.window_radius || lut.sigma() != params.sigma ||
      lut.resolution() != map.params().resolution)
    throw std::invalid_argument("score table does not match the match parameters");
  AcceleratedMatcher matcher(map, scan, params);
  const auto e = matcher.evaluate(FixedPose::from_pose(pose));
  return {e.score, e.matched};
}

double log_likelihood(const Pose2D& pose, const grid::OccupancyGrid& map, const Scan& scan,
                      const MatchParams& params) {
  ReferenceMatcher matcher(map, scan, params);
  return matcher.evaluate(pose).log_likelihood;
}

double log_likelihood(const Pose2D& pose, const grid::LocalBinaryMap& map, const Scan& scan,
                      const MatchParams& params) {
  AcceleratedMatcher matcher(map, scan, params);
  return matcher.evaluate(FixedPose::from_pose(pose)).log_likelihood;
}

MatchResult hill_climb(const grid::OccupancyGrid& map, const Scan& scan, const Pose2D& initial,
                       const MatchParams& params) {
  ReferenceMatcher matcher(map, scan, params);
  return matcher.hill_climb(initial);
}

MatchResult hill_climb(const grid::LocalBinaryMap& map, const Scan& scan, const Pose2D& initial,
                       const MatchParams& params) {
  AcceleratedMatcher matcher(map, scan, params);
  return matcher.hill_climb(initial);
}

}  // namespace gmslam::match
