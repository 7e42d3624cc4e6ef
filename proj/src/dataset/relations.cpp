#include "gmslam/dataset/relations.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace gmslam::dataset {

std::vector<Relation> parse_relations(std::istream& in, const RelationOptions& options,
                                      ParseDiagnostics* diagnostics) {
  ParseDiagnostics local;
  ParseDiagnostics& diag = diagnostics ? *diagnostics : local;
  std::vector<Relation> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    ++diag.lines;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      ++diag.skipped;
      continue;
    }
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    double v[8];
    bool ok = true;
    for (double& x : v) ok = ok && static_cast<bool>(fields >> x) && std::isfinite(x);
    std::string extra;
    const char* problem = nullptr;
    if (!ok || (fields >> extra))
      problem = "expected 8 numeric fields";
    else if (!(v[0] < v[1]))
      problem = "relation needs t1 < t2";
    if (problem) {
      if (options.strict) throw ParseError(number, problem);
      ++diag.malformed;
      diag.issues.push_back({number, problem});
      continue;
    }
    out.push_back({v[0], v[1], Pose2D(v[2], v[3], v[7])});
  }
  if (in.bad()) throw ParseError(number, "read error");
  return out;
}

std::vector<Relation> load_relations(const std::string& path, const RelationOptions& options,
                                     ParseDiagnostics* diagnostics) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open relations file '" + path + "'");
  return parse_relations(in, options, diagnostics);
}

void write_relations(std::ostream& out, std::span<const Relation> relations) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const Relation& r : relations)
    out << r.t1 << ' ' << r.t2 << ' ' << r.delta.x << ' ' << r.delta.y << " 0 0 0 "
        << r.delta.theta << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace gmslam::dataset
