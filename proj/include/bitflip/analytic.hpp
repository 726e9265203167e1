#pragma once

// Closed-form probabilities for a single uniformly placed bit-flip on a word
// drawn uniformly from the bit patterns of its class.

#include <bitflip/format.hpp>
#include <bitflip/rational.hpp>
#include <bitflip/relerr.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bitflip {

inline constexpr std::size_t class_index(FpClass c) { return static_cast<std::size_t>(c); }

/// How flips that turn a normalized number into NaN/Inf are accounted.
/// PaperCompat folds them into the ">= 1" bucket; Separated reports them on
/// their own.
enum class Convention { PaperCompat, Separated };

inline std::string to_string(Convention c) { return c == Convention::PaperCompat ? "paper-compat" : "separated"; }

inline Convention parse_convention(std::string_view text) {
  if (text == "paper-compat" || text == "paper") return Convention::PaperCompat;
  if (text == "separated") return Convention::Separated;
  throw std::invalid_argument("unknown convention: " + std::string(text));
}

struct TransitionMatrix {
  FpFormat format;
  std::array<std::array<ExactRational, 4>, 4> cells;

  const ExactRational& operator()(FpClass from, FpClass to) const { return cells[class_index(from)][class_index(to)]; }
  ExactRational& operator()(FpClass from, FpClass to) { return cells[class_index(from)][class_index(to)]; }

  ExactRational row_sum(FpClass from) const {
    ExactRational s = 0;
    for (const auto& c : cells[class_index(from)]) s += c;
    return s;
  }
};

namespace detail {

struct FormatConstants {
  ExactRational we, wf, width, normal_exponents, fraction_patterns;
  explicit FormatConstants(const FpFormat& f)
      : we(f.exponent_bits()),
        wf(f.fraction_bits()),
        width(f.total_bits()),
        normal_exponents(pow2(f.exponent_bits()) - 2),
        fraction_patterns(pow2(f.fraction_bits())) {}
};

}  // namespace detail

inline TransitionMatrix transition_matrix(const FpFormat& format) {
  const detail::FormatConstants k(format);
  using C = FpClass;
  TransitionMatrix m{format, {}};
  for (auto& row : m.cells)
    for (auto& c : row) c = 0;

  // A normalized exponent reaches all-ones (all-zeros) by one flip only if it
  // has exactly one zero (one) bit: exponent_bits such exponents each.
  const ExactRational edge = k.we / k.normal_exponents / k.width;
  m(C::Normalized, C::NaN) = edge * (1 - 1 / k.fraction_patterns);
  m(C::Normalized, C::Inf) = edge / k.fraction_patterns;
  m(C::Normalized, C::Denormalized) = edge;
  m(C::Normalized, C::Normalized) = 1 - 2 * edge;

  m(C::NaN, C::Normalized) = k.we / k.width;
  m(C::NaN, C::Inf) = k.wf / (k.fraction_patterns - 1) / k.width;
  m(C::NaN, C::Denormalized) = 0;
  m(C::NaN, C::NaN) = 1 - m(C::NaN, C::Normalized) - m(C::NaN, C::Inf);

  m(C::Inf, C::NaN) = k.wf / k.width;
  m(C::Inf, C::Normalized) = k.we / k.width;
  m(C::Inf, C::Inf) = 1 / k.width;
  m(C::Inf, C::Denormalized) = 0;

  m(C::Denormalized, C::Denormalized) = (1 + k.wf) / k.width;
  m(C::Denormalized, C::Normalized) = k.we / k.width;
  m(C::Denormalized, C::NaN) = 0;
  m(C::Denormalized, C::Inf) = 0;

  for (auto& row : m.cells)
    for (auto& c : row) c.canonicalize();
  return m;
}

/// Error-interval probabilities for a normalized source word.
struct IntervalProbabilities {
  Convention convention;
  ExactRational ge_1;
  ExactRational between_half_and_1;  // open interval (1/2, 1)
  ExactRational le_half;
  ExactRational nonfinite;  // always 0 under PaperCompat

  ExactRational total() const { return ge_1 + between_half_and_1 + le_half + nonfinite; }
};

inline IntervalProbabilities interval_probabilities(const FpFormat& format, Convention convention) {
  const detail::FormatConstants k(format);
  const ExactRational edge = k.we / k.normal_exponents / k.width;
  // Each exponent bit is 0 in exactly half of the normalized exponents.
  const ExactRational exponent_one_to_zero = k.we / (2 * k.width);
  // LSB 1 -> 0 with x' still normalized gives exactly 1/2: odd exponents except e = 1.
  const ExactRational exactly_half = (pow2(format.exponent_bits() - 1) - 2) / k.normal_exponents / k.width;
  // x' = 0: single-one exponent flipped with zero fraction.
  const ExactRational to_zero = edge / k.fraction_patterns;

  IntervalProbabilities p{convention, 0, 0, 0, 0};
  p.ge_1 = 1 / k.width + k.we / (2 * k.width) + to_zero;
  p.between_half_and_1 = exponent_one_to_zero - exactly_half - to_zero;
  p.le_half = k.wf / k.width + exactly_half;
  if (convention == Convention::Separated) {
    // Exponents with one zero bit, that bit flipped: x' is NaN or Inf.
    p.nonfinite = edge;
    p.ge_1 -= edge;
  }
  p.ge_1.canonicalize();
  p.between_half_and_1.canonicalize();
  p.le_half.canonicalize();
  p.nonfinite.canonicalize();
  return p;
}

/// Pr(error <= 2^-i) = (wf + 1 - i) / W for a normalized source, 2 <= i <= wf.
inline ExactRational cdf_dyadic(const FpFormat& format, std::int64_t i) {
  if (i < 2 || i > format.fraction_bits())
    throw std::out_of_range("dyadic index " + std::to_string(i) + " outside [2, " +
                            std::to_string(format.fraction_bits()) + "]");
  return make_rational(format.fraction_bits() + 1 - i, format.total_bits());
}

struct BelowResolutionError : std::range_error {
  using std::range_error::range_error;
};

struct ThresholdBounds {
  ExactRational tolerance;
  ExactRational lower_bound;
  ExactRational upper_bound;
  std::int64_t lower_index;  // min{i : 2^-i <= tolerance}
  std::int64_t upper_index;  // max{i : 2^-i >= tolerance}
  bool resolvable;           // lower_index <= fraction_bits
};

namespace detail {

// Pr(error <= 2^-i) extended past the fraction width, where it is 0.
inline ExactRational cdf_dyadic_extended(const FpFormat& format, std::int64_t i) {
  if (i > format.fraction_bits()) return 0;
  return cdf_dyadic(format, i);
}

inline ThresholdBounds threshold_bounds_unchecked(const FpFormat& format, const ExactRational& tolerance) {
  if (sgn(tolerance) <= 0 || tolerance > ExactRational(1, 4))
    throw std::out_of_range("tolerance must lie in (0, 1/4]");
  const std::int64_t upper_index = dyadic_index(tolerance);
  const std::int64_t lower_index = pow2(-upper_index) == tolerance ? upper_index : upper_index + 1;
  return {tolerance,
          cdf_dyadic_extended(format, lower_index),
          cdf_dyadic_extended(format, upper_index),
          lower_index,
          upper_index,
          lower_index <= format.fraction_bits()};
}

}  // namespace detail

/// Bounds on Pr(error <= tolerance) from the two neighbouring dyadic points.
/// Throws BelowResolutionError when the tolerance is finer than 2^-wf.
inline ThresholdBounds decimal_threshold_bounds(const FpFormat& format, const ExactRational& tolerance) {
  ThresholdBounds b = detail::threshold_bounds_unchecked(format, tolerance);
  if (!b.resolvable)
    throw BelowResolutionError("tolerance " + to_exact_string(tolerance) + " is below the format's resolution 2^-" +
                               std::to_string(format.fraction_bits()));
  return b;
}

/// Rows for tolerances 10^-1 .. 10^-15. Rows below the format's resolution are
/// kept with resolvable = false and exact (zero) out-of-range CDF values.
inline std::vector<ThresholdBounds> tolerance_table(const FpFormat& format) {
  std::vector<ThresholdBounds> rows;
  for (unsigned m = 1; m <= 15; ++m)
    rows.push_back(detail::threshold_bounds_unchecked(format, make_rational(BigInt(1), pow10_int(m))));
  return rows;
}

}  // namespace bitflip
