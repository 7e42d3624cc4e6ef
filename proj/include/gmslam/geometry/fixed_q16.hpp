#pragma once

#include <cstdint>
#include <limits>
#include <utility>

namespace gmslam {

/// Sticky overflow flag for Q16.16 arithmetic. Operations that saturate set
/// `overflowed`; nothing clears it except the caller.
struct FixedStatus {
  bool overflowed = false;
  void clear() { overflowed = false; }
};

/// Signed Q16.16 fixed-point number: value = raw / 2^16.
///
/// This is the numeric format of the accelerated scan-matching backend.
/// Products round to nearest with ties away from zero and saturate on
/// overflow; conversions from out-of-range reals throw.
class FixedQ16 {
 public:
  static constexpr int kFracBits = 16;
  static constexpr std::int64_t kOne = std::int64_t{1} << kFracBits;
  static constexpr std::int32_t kRawMax = std::numeric_limits<std::int32_t>::max();
  static constexpr std::int32_t kRawMin = std::numeric_limits<std::int32_t>::min();

  constexpr FixedQ16() = default;

  static constexpr FixedQ16 from_raw(std::int32_t raw) {
    FixedQ16 f;
    f.raw_ = raw;
    return f;
  }

  /// Rounds to the nearest representable value (ties away from zero).
  /// Throws std::out_of_range outside [-32768, 32768 - 2^-16].
  static FixedQ16 from_real(double value);

  static constexpr FixedQ16 from_int(std::int16_t value) {
    return from_raw(static_cast<std::int32_t>(value) * static_cast<std::int32_t>(kOne));
  }

  static constexpr FixedQ16 max() { return from_raw(kRawMax); }
  static constexpr FixedQ16 min() { return from_raw(kRawMin); }

  constexpr std::int32_t raw() const { return raw_; }
  constexpr double to_real() const { return static_cast<double>(raw_) / static_cast<double>(kOne); }

  /// Largest integer not greater than the value.
  constexpr std::int32_t floor_int() const { return raw_ >> kFracBits; }

  friend constexpr bool operator==(FixedQ16, FixedQ16) = default;
  friend constexpr auto operator<=>(FixedQ16 a, FixedQ16 b) { return a.raw_ <=> b.raw_; }

 private:
  std::int32_t raw_ = 0;
};

/// Saturates a 64-bit raw value into the Q16.16 range.
FixedQ16 saturate_raw(std::int64_t raw, FixedStatus& status);

FixedQ16 fixed_add(FixedQ16 a, FixedQ16 b, FixedStatus& status);
FixedQ16 fixed_sub(FixedQ16 a, FixedQ16 b, FixedStatus& status);

/// round_to_nearest(a * b) using a 64-bit intermediate; saturates on overflow.
FixedQ16 fixed_mul(FixedQ16 a, FixedQ16 b, FixedStatus& status);
FixedQ16 fixed_mul(FixedQ16 a, FixedQ16 b);

/// Rounds raw_product / 2^16 to nearest, ties away from zero.
constexpr std::int64_t round_shift_q16(std::int64_t product) {
  constexpr std::int64_t kHalf = std::int64_t{1} << (FixedQ16::kFracBits - 1);
  return product >= 0 ? (product + kHalf) >> FixedQ16::kFracBits
                      : -((-product + kHalf) >> FixedQ16::kFracBits);
}

/// sin and cos of `theta` evaluated in double precision on the quantized
/// argument, each rounded to the nearest Q16.16 value.
std::pair<FixedQ16, FixedQ16> fixed_sincos(FixedQ16 theta);

/// Wraps a Q16.16 angle into [-pi, pi) using the quantized period.
FixedQ16 fixed_normalize_angle(FixedQ16 theta);

namespace fixed_constants {
/// Nearest Q16.16 values of pi and 2*pi.
inline constexpr std::int32_t kPiRaw = 205887;
inline constexpr std::int32_t kTwoPiRaw = 411775;
}  // namespace fixed_constants

}  // namespace gmslam
