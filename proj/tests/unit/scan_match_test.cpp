#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gmslam/grid/local_binary_map.hpp"
#include "gmslam/match/scan_matcher.hpp"
#include "gmslam/match/score_lut.hpp"
#include "oracles.hpp"
#include "test_world.hpp"

namespace gmslam::match {
namespace {

using grid::CellIndex;
using grid::GridParams;
using grid::OccupancyGrid;
using grid::OccupancyThreshold;

constexpr double kPi = 3.14159265358979323846;

using testing::accelerated_window_oracle;
using testing::offset_before;
using testing::reference_window_oracle;

TEST(WindowSearchOrder, SortedBySquaredLengthThenRowMajor) {
  for (std::int32_t k = 1; k <= 4; ++k) {
    const auto order = window_search_order(k);
    ASSERT_EQ(order.size(), static_cast<std::size_t>((2 * k + 1) * (2 * k + 1)));
    EXPECT_EQ(order[0].kx, 0);
    EXPECT_EQ(order[0].ky, 0);
    for (std::size_t i = 1; i < order.size(); ++i)
      ASSERT_TRUE(offset_before(order[i - 1].kx, order[i - 1].ky, order[i].kx, order[i].ky));
  }
  const auto k1 = window_search_order(1);
  EXPECT_EQ(k1[1].kx, 0);
  EXPECT_EQ(k1[1].ky, -1);
  EXPECT_EQ(k1[2].kx, -1);
  EXPECT_EQ(k1[2].ky, 0);
}

TEST(ProjectBeam, HandExamples) {
  const auto a = project_beam({0, 0, 0}, {1, 0});
  EXPECT_EQ(a.x, 1.0);
  EXPECT_EQ(a.y, 0.0);
  const auto b = project_beam({1, 2, kPi / 2}, {1, 0});
  EXPECT_NEAR(b.x, 1.0, 1e-15);
  EXPECT_NEAR(b.y, 3.0, 1e-15);
}

TEST(ProjectBeam, FixedPointCloseToDouble) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(-100, 100), ang(-kPi, kPi), range(0.05, 20);
  for (int i = 0; i < 10000; ++i) {
    const Pose2D pose{pos(rng), pos(rng), ang(rng)};
    const Beam beam{range(rng), ang(rng)};
    FixedStatus status;
    const auto [fx, fy] = project_beam_q16(FixedPose::from_pose(pose), beam, status);
    const auto d = project_beam(pose, beam);
    const double bound = 4.0 * 0x1.0p-16 * (1.0 + beam.range);
    ASSERT_FALSE(status.overflowed);
    ASSERT_LE(std::abs(fx.to_real() - d.x), bound) << i;
    ASSERT_LE(std::abs(fy.to_real() - d.y), bound) << i;
  }
}

// A beam from (0.025, 0.025) heading +x: C^H = (20, 0), C^M = (19, 0).
struct SingleBeamWorld {
  Pose2D pose{0.025, 0.025, 0.0};
  Beam beam{1.0, 0.0};
  MatchParams params = MatchParams::for_resolution(0.05);
  OccupancyGrid map;
  std::optional<WindowMatch> reference() const { return find_min_distance(pose, map, beam, params); }
  std::optional<WindowMatch> accelerated() const {
    const auto local = grid::extract_local_map(map, pose, 64, OccupancyThreshold(0.5));
    return find_min_distance(pose, local, beam, params);
  }
};

TEST(FindMinDistance, BeamCellsOfTheHandExample) {
  SingleBeamWorld w;
  const auto cells = beam_cells(w.pose, w.beam, w.map.params(), w.params.pullback);
  EXPECT_EQ(cells.hit, (CellIndex{20, 0}));
  EXPECT_EQ(cells.miss, (CellIndex{19, 0}));
}

TEST(FindMinDistance, ExactAlignment) {
  SingleBeamWorld w;
  w.map.set_log_odds({20, 0}, 5.0f);
  w.map.set_log_odds({18, 0}, -5.0f);
  EXPECT_EQ(w.reference(), (WindowMatch{0, 0}));
  EXPECT_EQ(w.accelerated(), (WindowMatch{0, 0}));
}

TEST(FindMinDistance, SingleObstacleOneCellAway) {
  SingleBeamWorld w;
  w.map.set_log_odds({21, 0}, 5.0f);
  w.map.set_log_odds({19, 0}, -5.0f);
  EXPECT_EQ(w.reference(), (WindowMatch{1, 0}));
  EXPECT_EQ(w.accelerated(), (WindowMatch{1, 0}));
}

TEST(FindMinDistance, EverythingOccupiedMeansNoMatch) {
  SingleBeamWorld w;
  for (std::int32_t y = -5; y <= 5; ++y)
    for (std::int32_t x = 10; x <= 30; ++x) w.map.set_log_odds({x, y}, 5.0f);
  EXPECT_FALSE(w.reference().has_value());
  EXPECT_FALSE(w.accelerated().has_value());
}

TEST(FindMinDistance, ThresholdIsStrict) {
  SingleBeamWorld w;
  w.map.set_log_odds({20, 0}, 0.0f);  // probability exactly 0.5
  EXPECT_FALSE(w.reference().has_value());
  EXPECT_FALSE(w.accelerated().has_value());
}

TEST(FindMinDistance, AcceleratedRejectsCellsOffTheLocalMap) {
  SingleBeamWorld w;
  w.map.set_log_odds({20, 0}, 5.0f);
  const auto local = grid::extract_local_map(w.map, w.pose, 16, OccupancyThreshold(0.5));
  EXPECT_FALSE(find_min_distance(w.pose, local, w.beam, w.params).has_value());
  EXPECT_EQ(w.reference(), (WindowMatch{0, 0}));
}

TEST(FindMinDistance, ReferenceAgreesWithBruteForce) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(-2, 2), ang(-kPi, kPi), range(0.1, 3.5);
  for (int trial = 0; trial < 40; ++trial) {
    const OccupancyGrid map = testing::random_grid(rng, 64, 0.2 + 0.15 * (trial % 4));
    MatchParams params = MatchParams::for_resolution(0.05);
    params.window_radius = 1 + trial % 3;
    params.occupancy_threshold = trial % 2 ? 0.5 : 0.8;
    for (int i = 0; i < 50; ++i) {
      const Pose2D pose{pos(rng), pos(rng), ang(rng)};
      const Beam beam{range(rng), ang(rng)};
      ASSERT_EQ(find_min_distance(pose, map, beam, params), reference_window_oracle(pose, map, beam, params));
    }
  }
}

TEST(FindMinDistance, AcceleratedAgreesWithBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-2, 2), ang(-kPi, kPi), range(0.1, 3.5);
  for (int trial = 0; trial < 40; ++trial) {
    const OccupancyGrid map = testing::random_grid(rng, 64, 0.2 + 0.15 * (trial % 4));
    MatchParams params = MatchParams::for_resolution(0.05);
    params.window_radius = 1 + trial % 3;
    const Pose2D center{pos(rng), pos(rng), 0.0};
    const auto local = grid::extract_local_map(map, center, 32 + trial, OccupancyThreshold(0.5));
    for (int i = 0; i < 50; ++i) {
      const Pose2D pose{center.x + pos(rng) / 4, center.y + pos(rng) / 4, ang(rng)};
      const Beam beam{range(rng), ang(rng)};
      ASSERT_EQ(find_min_distance(pose, local, beam, params),
                accelerated_window_oracle(pose, local, beam, params));
    }
  }
}

TEST(FindMinDistance, BackendsAgreeWhenLocalMapCoversTheWindow) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-1, 1), ang(-kPi, kPi), range(0.1, 2.0);
  std::size_t agree = 0, total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const OccupancyGrid map = testing::random_grid(rng, 80, 0.2);
    const MatchParams params = MatchParams::for_resolution(0.05);
    for (int i = 0; i < 100; ++i) {
      const Pose2D pose{pos(rng), pos(rng), ang(rng)};
      const Beam beam{range(rng), ang(rng)};
      const auto local = grid::extract_local_map(map, pose, 64, OccupancyThreshold(0.5));
      agree += find_min_distance(pose, map, beam, params) == find_min_distance(pose, local, beam, params);
      ++total;
    }
  }
  // Fixed-point rounding can move an endpoint across a cell boundary.
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.97);
}

TEST(ScoreLut, HandValues) {
  const ScoreLUT lut = build_score_lut(1, 0.05, 0.05);
  EXPECT_EQ(lut.at(0, 0), 1.0);
  EXPECT_NEAR(lut.at(1, 0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(lut.at(-1, 0), 0.6065306597126334, 1e-12);
  EXPECT_NEAR(lut.at(1, 1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(lut.at(-1, 1), 0.36787944117144233, 1e-12);
  EXPECT_EQ(lut.entries().size(), 9u);
}

TEST(ScoreLut, MatchesDirectEvaluationAndSymmetries) {
  for (std::int32_t k = 1; k <= 5; ++k)
    for (const double res : {0.05, 0.1, 0.025})
      for (const double sigma : {0.05, 0.1, 0.2}) {
        const ScoreLUT lut(k, res, sigma);
        for (std::int32_t ky = -k; ky <= k; ++ky)
          for (std::int32_t kx = -k; kx <= k; ++kx) {
            const double d = std::sqrt(static_cast<double>(kx * kx + ky * ky)) * res;
            const double want = std::exp(-d * d / (2 * sigma * sigma));
            ASSERT_NEAR(lut.at(kx, ky), want, 1e-12);
            ASSERT_NEAR(lut.log_at(kx, ky), std::log(want), 1e-9);
            ASSERT_EQ(lut.at(kx, ky), lut.at(-kx, -ky));
            ASSERT_EQ(lut.at(kx, ky), lut.at(ky, kx));
            ASSERT_GT(lut.at(kx, ky), 0.0);
            ASSERT_LE(lut.at(kx, ky), 1.0);
          }
      }
  EXPECT_THROW(ScoreLUT(0, 0.05, 0.05), std::invalid_argument);
  EXPECT_THROW(ScoreLUT(1, 0.05, 0.0), std::invalid_argument);
}

TEST(MatchParams, ValidationAndResolutionDefaults) {
  MatchParams p = MatchParams::for_resolution(0.1);
  EXPECT_NEAR(p.pullback, std::sqrt(2.0) * 0.1, 1e-15);
  EXPECT_EQ(p.sigma, 0.1);
  EXPECT_EQ(p.convergence_step, 0.1 / 8);
  EXPECT_NO_THROW(p.validate());
  p.window_radius = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = MatchParams{};
  p.fixed_iterations = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = MatchParams{};
  p.sigma = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = MatchParams{};
  p.pullback = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Score, HandExamples) {
  SingleBeamWorld w;
  Scan scan;
  scan.beams.push_back(w.beam);
  const ScoreLUT lut(1, 0.05, w.params.sigma);
  const auto none = score(w.pose, w.map, scan, w.params, lut);
  EXPECT_EQ(none.score, 0.0);
  EXPECT_EQ(none.matched, 0u);
  EXPECT_EQ(log_likelihood(w.pose, w.map, scan, w.params), -4.0);

  w.map.set_log_odds({21, 1}, 5.0f);
  const auto diag = score(w.pose, w.map, scan, w.params, lut);
  EXPECT_NEAR(diag.score, 0.36787944117144233, 1e-12);
  EXPECT_EQ(diag.matched, 1u);
  const auto local = grid::extract_local_map(w.map, w.pose, 64, OccupancyThreshold(0.5));
  const auto acc = score(w.pose, local, scan, w.params, lut);
  EXPECT_EQ(acc.score, lut.at(1, 1));
  EXPECT_NEAR(log_likelihood(w.pose, w.map, scan, w.params), -1.0, 1e-12);
  EXPECT_THROW(score(w.pose, local, scan, w.params, ScoreLUT(2, 0.05, 0.05)), std::invalid_argument);
}

// Map built from `scan` itself, so every beam matches at (0, 0).
struct SelfConsistent {
  sim::World world = sim::World::furnished_room();
  Pose2D pose{3.1, 4.05, 0.4};
  Scan scan = testing::render_scan(world, pose, 91);
  OccupancyGrid map;
  SelfConsistent() {
    for (int i = 0; i < 3; ++i) grid::add_scan(map, pose, scan);
  }
};

TEST(Score, AllBeamsAtCenterScoreN) {
  SelfConsistent s;
  const MatchParams params = MatchParams::for_resolution(0.05);
  const auto r = score(s.pose, s.map, s.scan, params, ScoreLUT(1, 0.05, 0.05));
  ASSERT_EQ(r.matched, s.scan.valid_count());
  EXPECT_EQ(r.score, static_cast<double>(r.matched));
  EXPECT_EQ(log_likelihood(s.pose, s.map, s.scan, params), 0.0);
}

TEST(LogLikelihood, MonotoneInCenterMatches) {
  SingleBeamWorld w;
  Scan scan;
  scan.beams = {{1.0, -0.3}, {1.0, 0.0}, {1.0, 0.3}};
  double previous = log_likelihood(w.pose, w.map, scan, w.params);
  EXPECT_EQ(previous, -12.0);
  for (const Beam& b : scan.beams) {
    const auto cells = beam_cells(w.pose, b, w.map.params(), w.params.pullback);
    w.map.set_log_odds(cells.hit, 5.0f);
    const double now = log_likelihood(w.pose, w.map, scan, w.params);
    EXPECT_GT(now, previous);
    previous = now;
  }
  EXPECT_EQ(previous, 0.0);
}

TEST(HillClimb, ReferenceKeepsPerfectAlignment) {
  SelfConsistent s;
  const MatchParams params = MatchParams::for_resolution(0.05);
  const MatchResult r = hill_climb(s.map, s.scan, s.pose, params);
  EXPECT_EQ(r.pose.x, s.pose.x);
  EXPECT_EQ(r.pose.y, s.pose.y);
  EXPECT_EQ(r.pose.theta, s.pose.theta);
  EXPECT_EQ(r.score, static_cast<double>(r.matched_beams));
  EXPECT_EQ(r.matched_beams, r.valid_beams);
  EXPECT_EQ(r.score_evaluations, 1u + 6u * static_cast<std::size_t>(r.iterations_used));
}

TEST(HillClimb, AcceleratedKeepsPerfectAlignment) {
  SelfConsistent s;
  const MatchParams params = MatchParams::for_resolution(0.05);
  const auto local = grid::extract_local_map(s.map, s.pose, 128, OccupancyThreshold(0.5));
  AcceleratedMatcher matcher(local, s.scan, params);
  const FixedPose start = FixedPose::from_pose(s.pose);
  const auto initial = matcher.evaluate(start);
  const MatchResult r = matcher.hill_climb(s.pose);
  EXPECT_GE(r.score, initial.score);
  if (initial.score == static_cast<double>(matcher.valid_beams())) {
    EXPECT_EQ(r.pose.x, start.to_pose().x);
    EXPECT_EQ(r.pose.y, start.to_pose().y);
    EXPECT_EQ(r.pose.theta, start.to_pose().theta);
  }
  EXPECT_EQ(r.iterations_used, params.fixed_iterations);
}

struct Octagon {
  sim::World world = sim::World::octagon_room(4.0);
  OccupancyGrid map = testing::build_map(world, {{0, 0, 0}, {1, 0.5, 1}, {-1, -0.5, 2}});
};

TEST(HillClimb, RecoversOffsetPose) {
  Octagon o;
  const MatchParams params = MatchParams::for_resolution(0.05);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-1.2, 1.2), ang(-kPi, kPi);
  for (int i = 0; i < 10; ++i) {
    const Pose2D truth{pos(rng), pos(rng), ang(rng)};
    const Scan scan = testing::render_scan(o.world, truth, 181, 2 * kPi * 180 / 181);
    const Pose2D guess = compose(truth, {0.1, 0.0, 0.0});
    const MatchResult ref = hill_climb(o.map, scan, guess, params);
    EXPECT_LE(std::hypot(ref.pose.x - truth.x, ref.pose.y - truth.y), 2 * 0.05) << i;
    EXPECT_LE(std::abs(normalize_angle(ref.pose.theta - truth.theta)), 0.02) << i;
    EXPECT_LE(ref.iterations_used, params.max_iterations);

    const auto local = grid::extract_local_map(o.map, guess, 128, OccupancyThreshold(0.5));
    const MatchResult acc = hill_climb(local, scan, guess, params);
    EXPECT_LE(std::hypot(acc.pose.x - truth.x, acc.pose.y - truth.y), 2 * 0.05) << i;
    EXPECT_LE(std::abs(normalize_angle(acc.pose.theta - truth.theta)), 0.02) << i;
  }
}

TEST(HillClimb, ScoreNeverDecreases) {
  Octagon o;
  const MatchParams params = MatchParams::for_resolution(0.05);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pos(-1.5, 1.5), ang(-kPi, kPi), noise(-0.3, 0.3);
  for (int i = 0; i < 10; ++i) {
    const Pose2D truth{pos(rng), pos(rng), ang(rng)};
    const Scan scan = testing::render_scan(o.world, truth);
    const Pose2D guess{truth.x + noise(rng), truth.y + noise(rng), truth.theta + noise(rng) / 3};
    ReferenceMatcher ref(o.map, scan, params);
    const double start = ref.evaluate(guess).score;
    const MatchResult r = ref.hill_climb(guess);
    EXPECT_GE(r.score, start);
    EXPECT_LE(r.matched_beams, r.valid_beams);

    const auto local = grid::extract_local_map(o.map, guess, 100, OccupancyThreshold(0.5));
    AcceleratedMatcher acc(local, scan, params);
    const double acc_start = acc.evaluate(FixedPose::from_pose(guess)).score;
    const MatchResult a = acc.hill_climb(guess);
    EXPECT_GE(a.score, acc_start);
  }
}

TEST(HillClimb, AcceleratedWorkIsConstant) {
  Octagon o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-2, 2), ang(-kPi, kPi);
  for (const std::int32_t iterations : {1, 7, 25}) {
    MatchParams params = MatchParams::for_resolution(0.05);
    params.fixed_iterations = iterations;
    for (int i = 0; i < 8; ++i) {
      const Pose2D pose{pos(rng), pos(rng), ang(rng)};
      // Sometimes an empty scan, sometimes an empty map.
      const Scan scan = i == 0 ? Scan{} : testing::render_scan(o.world, pose);
      const OccupancyGrid empty;
      const auto local = grid::extract_local_map(i == 1 ? empty : o.map, pose, 64, OccupancyThreshold(0.5));
      const MatchResult r = hill_climb(local, scan, pose, params);
      EXPECT_EQ(r.iterations_used, iterations);
      EXPECT_EQ(r.score_evaluations, 1u + 6u * static_cast<std::size_t>(iterations));
    }
  }
}

TEST(HillClimb, ReferenceIterationsBounded) {
  Octagon o;
  MatchParams params = MatchParams::for_resolution(0.05);
  const Scan scan = testing::render_scan(o.world, {0.3, 0.2, 0.1});
  // Step halves from 0.05 below 0.00625 after at most 4 non-improving rounds.
  const MatchResult r = hill_climb(o.map, scan, {0.3, 0.2, 0.1}, params);
  EXPECT_GE(r.iterations_used, 4);
  params.max_iterations = 2;
  EXPECT_EQ(hill_climb(o.map, scan, {0.5, 0.2, 0.1}, params).iterations_used, 2);
  params.max_iterations = 0;
  const MatchResult none = hill_climb(o.map, scan, {0.5, 0.2, 0.1}, params);
  EXPECT_EQ(none.iterations_used, 0);
  EXPECT_EQ(none.score_evaluations, 1u);
}

TEST(HillClimb, AcceleratedIsDeterministicAndNearReference) {
  Octagon o;
  const MatchParams params = MatchParams::for_resolution(0.05);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-1.5, 1.5), ang(-kPi, kPi), noise(-0.1, 0.1);
  double total = 0.0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    const Pose2D truth{pos(rng), pos(rng), ang(rng)};
    const Scan scan = testing::render_scan(o.world, truth);
    const Pose2D guess{truth.x + noise(rng), truth.y + noise(rng), truth.theta + noise(rng) / 5};
    const auto local = grid::extract_local_map(o.map, guess, 128, OccupancyThreshold(0.5));
    const MatchResult a = hill_climb(local, scan, guess, params);
    const MatchResult b = hill_climb(local, scan, guess, params);
    ASSERT_EQ(a.pose.x, b.pose.x);
    ASSERT_EQ(a.pose.y, b.pose.y);
    ASSERT_EQ(a.pose.theta, b.pose.theta);
    ASSERT_EQ(a.score, b.score);
    const MatchResult r = hill_climb(o.map, scan, guess, params);
    total += std::hypot(a.pose.x - r.pose.x, a.pose.y - r.pose.y);
  }
  EXPECT_LE(total / n, 0.05);
}

TEST(HillClimb, AcceleratedRejectsPoseOutsideLocalMap) {
  const OccupancyGrid map;
  const auto local = grid::extract_local_map(map, {0, 0, 0}, 16, OccupancyThreshold(0.5));
  EXPECT_THROW(hill_climb(local, Scan{}, {5, 5, 0}, MatchParams{}), std::invalid_argument);
}

TEST(HillClimb, AcceleratedMatchesAcrossIsas) {
  Octagon o;
  const MatchParams params = MatchParams::for_resolution(0.05);
  const Pose2D pose{0.4, -0.3, 1.0};
  const Scan scan = testing::render_scan(o.world, pose);
  const Pose2D guess{0.5, -0.2, 1.05};
  const auto local = grid::extract_local_map(o.map, guess, 128, OccupancyThreshold(0.5));
  const kernels::Isa saved = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::kScalar);
  const MatchResult s = hill_climb(local, scan, guess, params);
  for (const auto isa : {kernels::Isa::kAvx2}) {
    if (!kernels::isa_supported(isa)) continue;
    kernels::set_active_isa(isa);
    const MatchResult v = hill_climb(local, scan, guess, params);
    EXPECT_EQ(v.pose.x, s.pose.x);
    EXPECT_EQ(v.pose.y, s.pose.y);
    EXPECT_EQ(v.pose.theta, s.pose.theta);
    EXPECT_EQ(v.score, s.score);
  }
  kernels::set_active_isa(saved);
}

}  // namespace
}  // namespace gmslam::match
