#include "gmslam/dataset/carmen.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string_view>

namespace gmslam::dataset {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

constexpr std::size_t kMaxBeams = 1 << 16;

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool to_real(std::string_view tok, double& out) {
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool to_count(std::string_view tok, std::size_t& out) {
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

struct LineError {
  std::string message;
};

LogEvent parse_flaser(const std::vector<std::string_view>& tok, const CarmenOptions& opt) {
  std::size_t n = 0;
  if (tok.size() < 2 || !to_count(tok[1], n)) throw LineError{"FLASER: bad beam count"};
  if (n == 0 || n > kMaxBeams) throw LineError{"FLASER: beam count out of range"};
  if (tok.size() != n + 11)
    throw LineError{"FLASER: expected " + std::to_string(n) + " ranges and 9 trailing fields"};
  std::vector<double> ranges(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!to_real(tok[2 + i], ranges[i])) throw LineError{"FLASER: bad range value"};
  double f[7];
  const std::size_t base = 2 + n;
  for (std::size_t i = 0; i < 7; ++i)
    if (!to_real(tok[base + i], f[i])) throw LineError{"FLASER: bad pose or timestamp field"};
  double logts = 0.0;
  if (!to_real(tok[base + 8], logts)) throw LineError{"FLASER: bad logger timestamp"};
  LogEvent ev;
  ev.odom = Pose2D(f[3], f[4], f[5]);
  ev.timestamp = f[6];
  ev.scan = Scan::uniform(ranges, -opt.field_of_view / 2.0, opt.field_of_view, opt.range_min,
                          opt.range_max);
  return ev;
}

LogEvent parse_odom(const std::vector<std::string_view>& tok) {
  if (tok.size() != 10) throw LineError{"ODOM: expected 9 fields"};
  double f[7];
  for (std::size_t i = 0; i < 7; ++i)
    if (!to_real(tok[1 + i], f[i])) throw LineError{"ODOM: bad numeric field"};
  double logts = 0.0;
  if (!to_real(tok[9], logts)) throw LineError{"ODOM: bad logger timestamp"};
  LogEvent ev;
  ev.odom = Pose2D(f[0], f[1], f[2]);
  ev.timestamp = f[6];
  return ev;
}

}  // namespace

std::vector<LogEvent> parse_carmen(std::istream& in, const CarmenOptions& options,
                                   ParseDiagnostics* diagnostics) {
  if (!(options.field_of_view > 0.0) || !(options.range_max > options.range_min) ||
      !(options.range_min >= 0.0))
    throw std::invalid_argument("invalid CARMEN parse options");
  ParseDiagnostics local;
  ParseDiagnostics& diag = diagnostics ? *diagnostics : local;
  std::vector<LogEvent> events;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    ++diag.lines;
    const auto tok = split(line);
    if (tok.empty()) continue;
    const std::string_view kind = tok[0];
    if (kind != "FLASER" && kind != "ODOM") {
      ++diag.skipped;
      continue;
    }
    try {
      LogEvent ev = kind == "FLASER" ? parse_flaser(tok, options) : parse_odom(tok);
      if (!events.empty() && ev.timestamp < events.back().timestamp)
        throw LineError{"timestamp goes backwards"};
      events.push_back(std::move(ev));
    } catch (const LineError& e) {
      if (options.strict) throw ParseError(number, e.message);
      ++diag.malformed;
      diag.issues.push_back({number, e.message});
    }
  }
  if (in.bad()) throw ParseError(number, "read error");
  return events;
}

std::vector<LogEvent> load_carmen(const std::string& path, const CarmenOptions& options,
                                  ParseDiagnostics* diagnostics) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open log file '" + path + "'");
  return parse_carmen(in, options, diagnostics);
}

void write_carmen(std::ostream& out, std::span<const LogEvent> events) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const LogEvent& ev : events) {
    const Pose2D& p = ev.odom;
    if (ev.scan) {
      out << "FLASER " << ev.scan->beams.size();
      for (const Beam& b : ev.scan->beams) out << ' ' << b.range;
      out << ' ' << p.x << ' ' << p.y << ' ' << p.theta;
      out << ' ' << p.x << ' ' << p.y << ' ' << p.theta;
    } else {
      out << "ODOM " << p.x << ' ' << p.y << ' ' << p.theta << " 0 0 0";
    }
    out << ' ' << ev.timestamp << " gmslam " << ev.timestamp << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

std::vector<ControlStep> controls_from_odometry(
    std::span<const LogEvent> events, const std::optional<rbpf::ProcessThresholds>& gating) {
  std::vector<ControlStep> steps;
  std::optional<Pose2D> last;
  for (const LogEvent& ev : events) {
    if (!ev.scan) continue;
    if (gating && !rbpf::should_process(last, ev.odom, *gating)) continue;
    ControlStep s;
    s.timestamp = ev.timestamp;
    s.odom = ev.odom;
    s.control = last ? inverse_compose(ev.odom, *last) : Pose2D{};
    s.scan = *ev.scan;
    steps.push_back(std::move(s));
    last = ev.odom;
  }
  return steps;
}

}  // namespace gmslam::dataset
