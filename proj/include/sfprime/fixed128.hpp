#pragma once

// 128-bit fixed-point fractions modulo one. A Frac128 holds x in [0, 1)
// as v / 2^128; addition and integer scaling wrap mod 2^128, which is
// exactly reduction mod 1. Multiplying a certified fraction by n adds at
// most n * 2^-128 of error, so the distance-to-nearest-integer values the
// exponential sums depend on survive far beyond double precision.

#include <cmath>
#include <cstdint>

namespace sfprime {

using uint128_t = unsigned __int128;

struct Frac128 {
  uint128_t v = 0;

  static Frac128 from_double(double x) {
    // Reduce to [0,1) and write the 53 mantissa bits into the fixed-point
    // grid; exact for any double with magnitude >= 2^-128.
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // x - floor(x) can round up to 1.0 for tiny x < 0
    double hi_d = std::floor(f * 0x1p64);
    double rem = f * 0x1p64 - hi_d;  // exact: same binade subtraction
    uint64_t hi = static_cast<uint64_t>(hi_d);
    uint64_t lo = static_cast<uint64_t>(std::floor(rem * 0x1p64));
    return Frac128{(static_cast<uint128_t>(hi) << 64) | lo};
  }

  double to_double() const {
    // Top 64 bits suffice for double precision.
    return static_cast<double>(static_cast<uint64_t>(v >> 64)) * 0x1p-64 +
           static_cast<double>(static_cast<uint64_t>(v)) * 0x1p-128;
  }

  Frac128 add(Frac128 o) const { return Frac128{v + o.v}; }       // wraps = mod 1
  Frac128 sub(Frac128 o) const { return Frac128{v - o.v}; }
  Frac128 mul_u64(uint64_t n) const { return Frac128{v * n}; }    // wraps = mod 1
  Frac128 negate() const { return Frac128{~v + 1}; }

  // ||x||: distance to the nearest integer, in [0, 1/2].
  double dist_to_nearest() const {
    uint128_t nd = ~v + 1;  // 2^128 - v, and 0 maps to 0
    uint128_t m = v < nd ? v : nd;
    return static_cast<double>(static_cast<uint64_t>(m >> 64)) * 0x1p-64 +
           static_cast<double>(static_cast<uint64_t>(m)) * 0x1p-128;
  }

  // Signed representative in [-1/2, 1/2).
  double centered() const {
    if (v >> 127) return to_double() - 1.0;
    return to_double();
  }
};

// ||x|| for a plain double.
inline double dist_nearest_int(double x) {
  double f = x - std::nearbyint(x);
  return std::fabs(f);
}

}  // namespace sfprime
