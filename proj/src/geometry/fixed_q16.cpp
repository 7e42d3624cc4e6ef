#include "gmslam/geometry/fixed_q16.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gmslam {

FixedQ16 FixedQ16::from_real(double value) {
  const double scaled = value * static_cast<double>(kOne);
  // std::llround rounds half away from zero.
  if (!std::isfinite(scaled) || scaled >= 2147483647.5 || scaled <= -2147483648.5) {
    std::ostringstream msg;
    msg << "value " << value << " is outside the Q16.16 range";
    throw std::out_of_range(msg.str());
  }
  return from_raw(static_cast<std::int32_t>(std::llround(scaled)));
}

FixedQ16 saturate_raw(std::int64_t raw, FixedStatus& status) {
  if (raw > FixedQ16::kRawMax) {
    status.overflowed = true;
    return FixedQ16::max();
  }
  if (raw < FixedQ16::kRawMin) {
    status.overflowed = true;
    return FixedQ16::min();
  }
  return FixedQ16::from_raw(static_cast<std::int32_t>(raw));
}

FixedQ16 fixed_add(FixedQ16 a, FixedQ16 b, FixedStatus& status) {
  return saturate_raw(std::int64_t{a.raw()} + b.raw(), status);
}

FixedQ16 fixed_sub(FixedQ16 a, FixedQ16 b, FixedStatus& status) {
  return saturate_raw(std::int64_t{a.raw()} - b.raw(), status);
}

FixedQ16 fixed_mul(FixedQ16 a, FixedQ16 b, FixedStatus& status) {
  return saturate_raw(round_shift_q16(std::int64_t{a.raw()} * b.raw()), status);
}

FixedQ16 fixed_mul(FixedQ16 a, FixedQ16 b) {
  FixedStatus ignored;
  return fixed_mul(a, b, ignored);
}

std::pair<FixedQ16, FixedQ16> fixed_sincos(FixedQ16 theta) {
  const double angle = theta.to_real();
  const double scale = static_cast<double>(FixedQ16::kOne);
  // |sin|, |cos| <= 1 so the rounded raw values always fit.
  const auto s = static_cast<std::int32_t>(std::llround(std::sin(angle) * scale));
  const auto c = static_cast<std::int32_t>(std::llround(std::cos(angle) * scale));
  return {FixedQ16::from_raw(s), FixedQ16::from_raw(c)};
}

FixedQ16 fixed_normalize_angle(FixedQ16 theta) {
  using namespace fixed_constants;
  std::int64_t raw = theta.raw();
  // kPiRaw / 2^16 is just below pi, so kPiRaw itself stays on the positive side.
  if (raw > kPiRaw || raw < -kPiRaw) {
    raw %= kTwoPiRaw;
    if (raw > kPiRaw) raw -= kTwoPiRaw;
    if (raw < -kPiRaw) raw += kTwoPiRaw;
  }
  return FixedQ16::from_raw(static_cast<std::int32_t>(raw));
}

}  // namespace gmslam
