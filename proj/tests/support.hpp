#pragma once

// Test-only oracles. These deliberately avoid the library's decode path: values
// come from the hardware float representation or from direct field formulas.

#include <bitflip/format.hpp>
#include <bitflip/rational.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace bitflip::testing {

/// Exact rational value of a finite double via frexp.
inline ExactRational rational_from_double(double d) {
  int exp = 0;
  const double m = std::frexp(d, &exp);  // d = m * 2^exp, 0.5 <= |m| < 1
  const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  return ExactRational(BigInt(static_cast<long>(mant))) * pow2(exp - 53);
}

inline ExactRational rational_from_float(float f) { return rational_from_double(static_cast<double>(f)); }

inline double double_from_bits(std::uint64_t bits) { return std::bit_cast<double>(bits); }
inline float float_from_bits(std::uint32_t bits) { return std::bit_cast<float>(bits); }

/// Value from the field formulas, written out independently of decode_value.
inline ExactRational value_by_formula(const FpFormat& f, unsigned sign, std::uint64_t e, std::uint64_t frac) {
  const ExactRational fraction = ExactRational(BigInt(static_cast<unsigned long>(frac))) / pow2(f.fraction_bits());
  const ExactRational mag = e == 0 ? ExactRational(fraction * pow2(1 - f.bias()))
                                   : ExactRational((1 + fraction) * pow2(static_cast<std::int64_t>(e) - f.bias()));
  return sign ? ExactRational(-mag) : mag;
}

/// Small formats (W <= 12) for exhaustive sweeps.
inline std::vector<FpFormat> small_formats() {
  return {FpFormat(2, 1), FpFormat(2, 3), FpFormat(3, 2), FpFormat(3, 4), FpFormat(4, 3),
          FpFormat(4, 7), FpFormat(5, 4), FpFormat(6, 5), FpFormat(5, 6), FpFormat(8, 3)};
}

}  // namespace bitflip::testing
