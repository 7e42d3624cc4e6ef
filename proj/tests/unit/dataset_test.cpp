#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gmslam/dataset/carmen.hpp"
#include "gmslam/dataset/relations.hpp"
#include "test_world.hpp"

namespace gmslam::dataset {
namespace {

using std::numbers::pi;

std::vector<LogEvent> parse(const std::string& text, ParseDiagnostics* diag = nullptr,
                            CarmenOptions options = {}) {
  std::istringstream in(text);
  return parse_carmen(in, options, diag);
}

TEST(ParseCarmen, EmptyStream) {
  ParseDiagnostics diag;
  EXPECT_TRUE(parse("", &diag).empty());
  EXPECT_EQ(diag.malformed, 0u);
}

TEST(ParseCarmen, FlaserExample) {
  const auto events = parse("FLASER 3 1.0 2.0 3.0 0 0 0 0 0 0 5.0 host 5.0\n");
  ASSERT_EQ(events.size(), 1u);
  const LogEvent& e = events[0];
  EXPECT_EQ(e.timestamp, 5.0);
  EXPECT_EQ(e.odom.x, 0.0);
  EXPECT_EQ(e.odom.y, 0.0);
  EXPECT_EQ(e.odom.theta, 0.0);
  ASSERT_TRUE(e.scan.has_value());
  ASSERT_EQ(e.scan->beams.size(), 3u);
  EXPECT_NEAR(e.scan->beams[0].angle, -pi / 2, 1e-15);
  EXPECT_NEAR(e.scan->beams[1].angle, 0.0, 1e-15);
  EXPECT_NEAR(e.scan->beams[2].angle, pi / 2, 1e-15);
  EXPECT_EQ(e.scan->beams[0].range, 1.0);
  EXPECT_EQ(e.scan->beams[2].range, 3.0);
}

TEST(ParseCarmen, OdomFieldsNotLaserFields) {
  const auto events = parse("FLASER 2 1 1 9 9 9 1.5 -2.5 0.25 7.0 host 7.1\n");
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].odom.x, 1.5);
  EXPECT_EQ(events[0].odom.y, -2.5);
  EXPECT_EQ(events[0].odom.theta, 0.25);
  EXPECT_EQ(events[0].timestamp, 7.0);
}

TEST(ParseCarmen, OdomAndUnknownLines) {
  ParseDiagnostics diag;
  const auto events = parse("PARAM foo bar\nODOM 1 2 0.5 0 0 0 3.0 host 3.0\n# note\n\n", &diag);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_FALSE(events[0].scan.has_value());
  EXPECT_EQ(events[0].odom.x, 1.0);
  EXPECT_EQ(events[0].timestamp, 3.0);
  EXPECT_GE(diag.skipped, 1u);
  EXPECT_EQ(diag.malformed, 0u);
}

TEST(ParseCarmen, MalformedLinesReportedWithLineNumbers) {
  ParseDiagnostics diag;
  const std::string text =
      "FLASER 3 1.0 2.0 0 0 0 0 0 0 5.0 host 5.0\n"     // one range short
      "FLASER 2 1.0 2.0 0 0 0 0 0 0 6.0 host 6.0\n"
      "FLASER 2 1.0 abc 0 0 0 0 0 0 7.0 host 7.0\n"
      "ODOM 1 2 3\n"
      "FLASER 2 1.0 2.0 0 0 0 0 0 0 4.0 host 4.0\n"     // time goes backwards
      "FLASER 0 0 0 0 0 0 0 8.0 host 8.0\n"
      "FLASER 2 1.0 nan 0 0 0 0 0 0 9.0 host 9.0\n";
  const auto events = parse(text, &diag);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].timestamp, 6.0);
  EXPECT_EQ(diag.malformed, 6u);
  ASSERT_EQ(diag.issues.size(), 6u);
  EXPECT_EQ(diag.issues[0].line, 1u);
  EXPECT_EQ(diag.issues[1].line, 3u);
  EXPECT_EQ(diag.issues[2].line, 4u);
  EXPECT_EQ(diag.issues[3].line, 5u);
}

TEST(ParseCarmen, StrictModeAborts) {
  CarmenOptions strict;
  strict.strict = true;
  try {
    parse("FLASER 2 1.0 2.0 0 0 0 0 0 0 6.0 host 6.0\nFLASER 5 1 2\n", nullptr, strict);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseCarmen, FieldOfViewAndRangeLimits) {
  CarmenOptions o;
  o.field_of_view = 2 * pi;
  o.range_max = 2.5;
  const auto events = parse("FLASER 5 1 2 3 4 0.01 0 0 0 0 0 0 1.0 h 1.0\n", nullptr, o);
  ASSERT_EQ(events.size(), 1u);
  const Scan& s = *events[0].scan;
  EXPECT_NEAR(s.beams.front().angle, -pi, 1e-15);
  EXPECT_NEAR(s.beams.back().angle, pi, 1e-15);
  EXPECT_EQ(s.valid_count(), 2u);
}

TEST(ParseCarmen, MissingFileIsAnError) {
  EXPECT_THROW(load_carmen("/nonexistent/log.carmen"), ParseError);
}

TEST(ParseCarmen, RoundTripAtSixDecimals) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(0.1, 30), p(-50, 50), a(-3.1, 3.1), dt(0.01, 1);
  std::vector<LogEvent> events;
  double t = 1000.0;
  for (int i = 0; i < 200; ++i) {
    LogEvent e;
    t += dt(rng);
    e.timestamp = std::round(t * 1e6) / 1e6;
    e.odom = {std::round(p(rng) * 1e6) / 1e6, std::round(p(rng) * 1e6) / 1e6,
              std::round(a(rng) * 1e6) / 1e6};
    if (i % 3 != 0) {
      std::vector<double> ranges(1 + rng() % 361);
      for (double& v : ranges) v = std::round(r(rng) * 1e6) / 1e6;
      e.scan = Scan::uniform(ranges, -pi / 2, pi, 0.05, 20.0);
    }
    events.push_back(e);
  }
  std::ostringstream out;
  write_carmen(out, events);
  ParseDiagnostics diag;
  const auto back = parse(out.str(), &diag);
  ASSERT_EQ(diag.malformed, 0u);
  ASSERT_EQ(back.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_NEAR(back[i].timestamp, events[i].timestamp, 5e-7);
    EXPECT_NEAR(back[i].odom.x, events[i].odom.x, 5e-7);
    EXPECT_NEAR(back[i].odom.y, events[i].odom.y, 5e-7);
    EXPECT_NEAR(back[i].odom.theta, events[i].odom.theta, 5e-7);
    ASSERT_EQ(back[i].scan.has_value(), events[i].scan.has_value());
    if (!events[i].scan) continue;
    ASSERT_EQ(back[i].scan->beams.size(), events[i].scan->beams.size());
    for (std::size_t b = 0; b < events[i].scan->beams.size(); ++b) {
      EXPECT_NEAR(back[i].scan->beams[b].range, events[i].scan->beams[b].range, 5e-7);
      EXPECT_NEAR(back[i].scan->beams[b].angle, events[i].scan->beams[b].angle, 1e-12);
    }
  }
  // Writing the reparsed events reproduces the text exactly.
  std::ostringstream again;
  write_carmen(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(ParseCarmen, ArbitraryBytesNeverCrash) {
  std::mt19937_64 rng(2);
  const std::string alphabet = "FLASERODOM0123456789.-+eE nan inf \t\n\r#x";
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    const std::size_t n = rng() % 400;
    for (std::size_t k = 0; k < n; ++k)
      text.push_back(i % 2 ? static_cast<char>(rng() & 0xff) : alphabet[rng() % alphabet.size()]);
    if (i % 5 == 0) text = "FLASER " + text;
    ParseDiagnostics diag;
    std::vector<LogEvent> events;
    ASSERT_NO_THROW(events = parse(text, &diag));
    for (std::size_t k = 1; k < events.size(); ++k) ASSERT_GE(events[k].timestamp, events[k - 1].timestamp);
    for (const auto& e : events)
      if (e.scan) { ASSERT_NO_THROW(e.scan->validate()); }
    CarmenOptions strict;
    strict.strict = true;
    try {
      parse(text, nullptr, strict);
    } catch (const ParseError&) {
    }
  }
}

TEST(ParseRelations, Examples) {
  std::istringstream empty("");
  EXPECT_TRUE(parse_relations(empty).empty());
  std::istringstream one("1.0 2.0 0.5 0 0 0 0 0.1\n");
  const auto r = parse_relations(one);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].t1, 1.0);
  EXPECT_EQ(r[0].t2, 2.0);
  EXPECT_EQ(r[0].delta.x, 0.5);
  EXPECT_EQ(r[0].delta.y, 0.0);
  EXPECT_EQ(r[0].delta.theta, 0.1);
}

TEST(ParseRelations, RejectsOrderViolationsAndMalformedLines) {
  std::istringstream in(
      "# comment\n"
      "2.0 2.0 0 0 0 0 0 0\n"
      "3.0 2.0 0 0 0 0 0 0\n"
      "1.0 2.0 0 0 0\n"
      "1.0 2.0 0 0 0 0 0 x\n"
      "4.0 5.0 1 2 9 9 9 0.3\n");
  ParseDiagnostics diag;
  const auto r = parse_relations(in, {}, &diag);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].delta.y, 2.0);
  EXPECT_EQ(diag.malformed, 4u);
  ASSERT_EQ(diag.issues.size(), 4u);
  EXPECT_EQ(diag.issues[0].line, 2u);
  std::istringstream strict_in("1.0 2.0 0 0 0 0 0 0\n2.0 1.0 0 0 0 0 0 0\n");
  try {
    parse_relations(strict_in, {true});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_relations("/nonexistent/relations.txt"), ParseError);
}

TEST(ParseRelations, RoundTrip) {
  std::vector<Relation> rel{{1.0, 2.5, {0.1, -0.2, 0.3}}, {2.0, 9.0, {-4.0, 5.5, -3.0}}};
  std::ostringstream out;
  write_relations(out, rel);
  std::istringstream in(out.str());
  const auto back = parse_relations(in);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].t1, rel[i].t1);
    EXPECT_EQ(back[i].t2, rel[i].t2);
    EXPECT_NEAR(back[i].delta.x, rel[i].delta.x, 1e-12);
    EXPECT_NEAR(back[i].delta.y, rel[i].delta.y, 1e-12);
    EXPECT_NEAR(back[i].delta.theta, rel[i].delta.theta, 1e-12);
  }
}

LogEvent laser(double t, Pose2D odom) {
  std::vector<double> ranges(5, 1.0);
  return {t, odom, Scan::uniform(ranges, -pi / 2, pi, 0.05, 20.0)};
}

TEST(Controls, Examples) {
  const std::vector<LogEvent> single{laser(1.0, {3, 4, 1})};
  const auto one = controls_from_odometry(single);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].control.x, 0.0);
  EXPECT_EQ(one[0].control.theta, 0.0);

  std::vector<LogEvent> straight;
  for (int i = 0; i < 5; ++i) straight.push_back(laser(i, {0.1 * i, 0, 0}));
  const auto s = controls_from_odometry(straight);
  ASSERT_EQ(s.size(), 5u);
  for (std::size_t i = 1; i < s.size(); ++i) {
    EXPECT_NEAR(s[i].control.x, 0.1, 1e-12);
    EXPECT_NEAR(s[i].control.y, 0.0, 1e-12);
    EXPECT_NEAR(s[i].control.theta, 0.0, 1e-12);
  }

  const std::vector<LogEvent> turn{laser(0, {1, 1, 0.2}), laser(1, {1, 1, 0.5})};
  const auto r = controls_from_odometry(turn);
  EXPECT_NEAR(r[1].control.x, 0.0, 1e-12);
  EXPECT_NEAR(r[1].control.y, 0.0, 1e-12);
  EXPECT_NEAR(r[1].control.theta, 0.3, 1e-12);
}

TEST(Controls, OdometryOnlyEventsAndGating) {
  std::vector<LogEvent> events{laser(0, {0, 0, 0}), {0.5, {0.02, 0, 0}, std::nullopt},
                               laser(1, {0.05, 0, 0}), laser(2, {0.12, 0, 0}),
                               laser(3, {0.14, 0, 0})};
  const auto all = controls_from_odometry(events);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_NEAR(all[1].control.x, 0.05, 1e-12);
  const auto gated = controls_from_odometry(events, rbpf::ProcessThresholds{0.1, 0.05});
  ASSERT_EQ(gated.size(), 2u);
  EXPECT_EQ(gated[1].timestamp, 2.0);
  EXPECT_NEAR(gated[1].control.x, 0.12, 1e-12);
  // Composing the controls reproduces the odometry of every returned step.
  Pose2D acc = gated[0].odom;
  for (std::size_t i = 1; i < gated.size(); ++i) {
    acc = compose(acc, gated[i].control);
    EXPECT_NEAR(acc.x, gated[i].odom.x, 1e-12);
  }
}

}  // namespace
}  // namespace gmslam::dataset
