#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gmslam/dataset/carmen.hpp"
#include "gmslam/geometry/pose.hpp"

namespace gmslam::dataset {

/// Ground-truth relative motion between the poses at t1 and t2.
struct Relation {
  double t1 = 0.0;
  double t2 = 0.0;
  Pose2D delta;
};

struct RelationOptions {
  bool strict = false;
};

/// Reads `t1 t2 x y z roll pitch yaw` lines; z, roll and pitch are dropped.
/// Lines with t1 >= t2 are rejected like malformed ones. Lines starting with
/// '#' are comments.
std::vector<Relation> parse_relations(std::istream& in, const RelationOptions& options = {},
                                      ParseDiagnostics* diagnostics = nullptr);
std::vector<Relation> load_relations(const std::string& path, const RelationOptions& options = {},
                                     ParseDiagnostics* diagnostics = nullptr);

/// Writes relations in the same format, 6 decimals.
void write_relations(std::ostream& out, std::span<const Relation> relations);

}  // namespace gmslam::dataset
