#pragma once

// Exact relative error |x - x'| / |x| of a single bit-flip, and the closed-form
// intervals it must fall into for normalized and denormalized x.

#include <bitflip/format.hpp>
#include <bitflip/injector.hpp>
#include <bitflip/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace bitflip {

class RelativeError {
 public:
  enum class Kind { Finite, NonFinite, Undefined };

  static RelativeError finite(ExactRational value) { return RelativeError(Kind::Finite, std::move(value)); }
  static RelativeError non_finite() { return RelativeError(Kind::NonFinite, 0); }
  static RelativeError undefined() { return RelativeError(Kind::Undefined, 0); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }

  const ExactRational& value() const {
    if (kind_ != Kind::Finite) throw std::logic_error("relative error is not finite");
    return value_;
  }

 private:
  RelativeError(Kind kind, ExactRational value) : kind_(kind), value_(std::move(value)) {}
  Kind kind_;
  ExactRational value_;
};

inline std::string to_string(RelativeError::Kind k) {
  switch (k) {
    case RelativeError::Kind::Finite: return "finite";
    case RelativeError::Kind::NonFinite: return "nonfinite";
    case RelativeError::Kind::Undefined: return "undefined";
  }
  return "?";
}

/// |a - b| / |a| for a != 0.
inline ExactRational exact_relative_error(const FiniteValue& a, const FiniteValue& b) {
  if (a.significand == 0) throw std::domain_error("relative error against zero");
  const std::int64_t base = std::min(a.scale, b.scale);
  BigInt lhs(static_cast<unsigned long>(a.significand));
  BigInt rhs(static_cast<unsigned long>(b.significand));
  mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(a.scale - base));
  mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(b.scale - base));
  BigInt diff = a.negative == b.negative ? BigInt(abs(lhs - rhs)) : BigInt(lhs + rhs);
  ExactRational r(diff, lhs);
  r.canonicalize();
  return r;
}

/// Relative error between an original word and a corrupted one.
inline RelativeError relative_error(const Word& original, const Word& corrupted) {
  const ExactValue v = decode_value(original);
  const auto* x = std::get_if<FiniteValue>(&v);
  if (x == nullptr || x->significand == 0) return RelativeError::undefined();
  const ExactValue v2 = decode_value(corrupted);
  const auto* x2 = std::get_if<FiniteValue>(&v2);
  if (x2 == nullptr) return RelativeError::non_finite();
  return RelativeError::finite(exact_relative_error(*x, *x2));
}

inline RelativeError relative_error(const Word& x, int pos) { return relative_error(x, flip_bit(x, pos)); }

/// Interval with optional unbounded top. A point interval has exact_point set
/// and lower == upper, both closed.
struct ErrorInterval {
  std::string rule;
  ExactRational lower;
  std::optional<ExactRational> upper;  // empty: no finite upper bound
  bool lower_open = false;
  bool upper_open = false;
  std::optional<ExactRational> exact_point;

  static ErrorInterval point(std::string rule, const ExactRational& p) {
    return {std::move(rule), p, p, false, false, p};
  }
  /// (lo, hi]
  static ErrorInterval left_open(std::string rule, const ExactRational& lo, const ExactRational& hi) {
    return {std::move(rule), lo, hi, true, false, std::nullopt};
  }
  /// (lo, +inf)
  static ErrorInterval above(std::string rule, const ExactRational& lo) {
    return {std::move(rule), lo, std::nullopt, true, true, std::nullopt};
  }

  bool contains(const ExactRational& q) const {
    const int lc = cmp(q, lower);
    if (lc < 0 || (lc == 0 && lower_open)) return false;
    if (!upper) return true;
    const int uc = cmp(q, *upper);
    return uc < 0 || (uc == 0 && !upper_open);
  }
};

inline std::string to_string(const ErrorInterval& iv) {
  if (iv.exact_point) return "{" + to_exact_string(*iv.exact_point) + "}";
  std::string s = iv.lower_open ? "(" : "[";
  s += to_exact_string(iv.lower) + ", ";
  s += iv.upper ? to_exact_string(*iv.upper) : "inf";
  s += iv.upper_open ? ")" : "]";
  return s;
}

namespace detail {

// 2^(2^j): the factor an exponent flip at in-field index k applies, j = we - k.
inline ExactRational exponent_step(int exponent_bits, int k) {
  return pow2(std::int64_t{1} << (exponent_bits - k));
}

inline void check_locus(const FpFormat& format, const FieldLocus& locus) { (void)bit_of_locus(format, locus); }

}  // namespace detail

/// Interval for a normalized x. `class_after` selects between the two
/// exponent 1 -> 0 cases (x' normalized vs x' denormalized).
inline ErrorInterval normalized_flip_interval(const Word& x, const FieldLocus& locus, FpClass class_after) {
  if (classify(x) != FpClass::Normalized) throw std::invalid_argument("normalized_flip_interval requires a normalized word");
  const auto& fmt = x.format();
  detail::check_locus(fmt, locus);
  switch (locus.field) {
    case Field::Sign:
      return ErrorInterval::point("sign", 2);
    case Field::Fraction:
      return ErrorInterval::left_open("fraction", pow2(-locus.index - 1), pow2(-locus.index));
    case Field::Exponent: {
      const int shift = fmt.exponent_bits() - locus.index;
      const bool bit_set = ((decode_fields(x).exponent >> shift) & 1U) != 0;
      const ExactRational step = detail::exponent_step(fmt.exponent_bits(), locus.index);
      if (!bit_set) return ErrorInterval::point("exponent-0to1", step - 1);
      const ExactRational shrink = 1 - 1 / step;
      if (class_after == FpClass::Denormalized) return ErrorInterval::left_open("exponent-1to0-denormal", shrink, 1);
      return ErrorInterval::point("exponent-1to0", shrink);
    }
  }
  throw std::invalid_argument("bad locus");
}

inline ErrorInterval normalized_flip_interval(const Word& x, int pos) {
  return normalized_flip_interval(x, locus_of_bit(x.format(), pos), classify(flip_bit(x, pos)));
}

/// Interval for a denormalized x; empty for x = ±0, where the relative error
/// is undefined. For exponent flips the closed form 2^(2^(we-k)) - 1 is only a
/// strict lower bound of the true error ((1.f)/(0.f)) * 2^(e'-1) - 1, so the
/// interval is (2^(2^(we-k)) - 1, inf).
inline std::optional<ErrorInterval> denormalized_flip_interval(const Word& x, const FieldLocus& locus) {
  if (classify(x) != FpClass::Denormalized) throw std::invalid_argument("denormalized_flip_interval requires a denormalized word");
  const auto& fmt = x.format();
  detail::check_locus(fmt, locus);
  const auto t = first_nonzero_fraction_entry(x);
  if (!t) return std::nullopt;
  switch (locus.field) {
    case Field::Sign:
      return ErrorInterval::point("denormal-sign", 2);
    case Field::Fraction:
      return ErrorInterval::left_open("denormal-fraction", pow2(*t - locus.index - 1), pow2(*t - locus.index));
    case Field::Exponent:
      return ErrorInterval::above("denormal-exponent", detail::exponent_step(fmt.exponent_bits(), locus.index) - 1);
  }
  throw std::invalid_argument("bad locus");
}

/// Closed-form value for a denormalized exponent flip,
/// 2^(2^(we-k)) - 1.
inline ExactRational denormalized_exponent_closed_form(const FpFormat& format, int k) {
  return detail::exponent_step(format.exponent_bits(), k) - 1;
}

enum class Verdict { Conforms, Violates, Informational };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Conforms: return "conforms";
    case Verdict::Violates: return "violates";
    case Verdict::Informational: return "informational";
  }
  return "?";
}

struct BoundsCheck {
  Verdict verdict;
  std::string detail;
  RelativeError error;
  std::optional<ErrorInterval> interval;
  std::optional<ExactRational> stated;     // denormalized exponent flips only
  std::optional<ExactRational> deviation;  // exact - stated
};

/// Computes the exact error of flipping `pos` and tests it against the
/// applicable interval.
inline BoundsCheck check_bounds(const Word& x, int pos) {
  const Word after = flip_bit(x, pos);
  RelativeError err = relative_error(x, after);
  const FieldLocus locus = locus_of_bit(x.format(), pos);
  const FpClass cls = classify(x);

  if (err.kind() == RelativeError::Kind::Undefined)
    return {Verdict::Informational, "relative error undefined for zero, NaN or Inf input", err, {}, {}, {}};

  if (cls == FpClass::Normalized) {
    ErrorInterval iv = normalized_flip_interval(x, locus, classify(after));
    if (!err.is_finite()) return {Verdict::Informational, "flip produces NaN or Inf", err, iv, {}, {}};
    const bool ok = iv.contains(err.value());
    return {ok ? Verdict::Conforms : Verdict::Violates, iv.rule + " " + to_string(iv), err, iv, {}, {}};
  }

  // Denormalized, nonzero.
  ErrorInterval iv = *denormalized_flip_interval(x, locus);
  const bool ok = iv.contains(err.value());
  if (locus.field == Field::Exponent) {
    ExactRational stated = denormalized_exponent_closed_form(x.format(), locus.index);
    ExactRational deviation = err.value() - stated;
    if (!ok) return {Verdict::Violates, "exact error not above stated value", err, iv, stated, deviation};
    return {Verdict::Informational, "exact error exceeds stated closed form", err, iv, stated, deviation};
  }
  return {ok ? Verdict::Conforms : Verdict::Violates, iv.rule + " " + to_string(iv), err, iv, {}, {}};
}

/// Buckets used by the interval probabilities.
enum class ErrorBucket { AtLeastOne, BetweenHalfAndOne, AtMostHalf, NonFinite, Undefined };

inline std::string to_string(ErrorBucket b) {
  switch (b) {
    case ErrorBucket::AtLeastOne: return "ge_1";
    case ErrorBucket::BetweenHalfAndOne: return "between_half_and_1";
    case ErrorBucket::AtMostHalf: return "le_half";
    case ErrorBucket::NonFinite: return "nonfinite";
    case ErrorBucket::Undefined: return "undefined";
  }
  return "?";
}

inline ErrorBucket bucket_of(const RelativeError& err) {
  switch (err.kind()) {
    case RelativeError::Kind::Undefined: return ErrorBucket::Undefined;
    case RelativeError::Kind::NonFinite: return ErrorBucket::NonFinite;
    case RelativeError::Kind::Finite: break;
  }
  const ExactRational& q = err.value();
  if (q >= 1) return ErrorBucket::AtLeastOne;
  if (cmp(q, ExactRational(1, 2)) > 0) return ErrorBucket::BetweenHalfAndOne;
  return ErrorBucket::AtMostHalf;
}

/// Largest integer i with q <= 2^-i; int64 max for q = 0.
inline std::int64_t dyadic_index(const ExactRational& q) {
  if (sgn(q) < 0) throw std::domain_error("negative error");
  if (sgn(q) == 0) return std::numeric_limits<std::int64_t>::max();
  const auto nb = static_cast<std::int64_t>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
  const auto db = static_cast<std::int64_t>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  const std::int64_t l = db - nb;
  // den/num lies in (2^(l-1), 2^(l+1)), so the answer is l or l - 1.
  BigInt shifted = q.get_num();
  if (l >= 0) {
    mpz_mul_2exp(shifted.get_mpz_t(), shifted.get_mpz_t(), static_cast<mp_bitcnt_t>(l));
    return shifted <= q.get_den() ? l : l - 1;
  }
  BigInt den = q.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-l));
  return shifted <= den ? l : l - 1;
}

}  // namespace bitflip
