#pragma once

// Exact rational arithmetic for probabilities and relative errors.
// Backed by GMP; values are always kept in canonical (reduced) form.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bitflip {

using ExactRational = mpq_class;
using BigInt = mpz_class;

/// 2^e as an exact rational, for any sign of e.
inline ExactRational pow2(std::int64_t e) {
  BigInt one = 1;
  BigInt p;
  mpz_mul_2exp(p.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
  if (e >= 0) return ExactRational(p);
  ExactRational r(BigInt(1), p);
  r.canonicalize();
  return r;
}

inline BigInt pow10_int(unsigned e) {
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, e);
  return p;
}

inline ExactRational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  ExactRational r(num, den);
  r.canonicalize();
  return r;
}

inline ExactRational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den)));
}

/// Exact "p/q" text; integers are written with a "/1" denominator.
inline std::string to_exact_string(const ExactRational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Approximate log2 of a positive rational; valid far outside double range.
inline double log2_approx(const ExactRational& q) {
  if (sgn(q) <= 0) throw std::domain_error("log2 of non-positive rational");
  long en = 0;
  long ed = 0;
  double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log2(mn) - std::log2(md) + static_cast<double>(en - ed);
}

namespace detail {

// Largest d with 10^d <= q, for q > 0.
inline long decimal_exponent(const ExactRational& q) {
  long d = static_cast<long>(std::floor(log2_approx(q) * 0.30102999566398120));
  auto ten_pow = [](long e) {
    return e >= 0 ? ExactRational(pow10_int(static_cast<unsigned>(e)))
                  : make_rational(BigInt(1), pow10_int(static_cast<unsigned>(-e)));
  };
  while (ten_pow(d) > q) --d;
  while (ten_pow(d + 1) <= q) ++d;
  return d;
}

// Round a non-negative rational to the nearest integer, ties to even.
inline BigInt round_half_even(const ExactRational& q) {
  BigInt floor_part;
  BigInt rem;
  mpz_fdiv_qr(floor_part.get_mpz_t(), rem.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  const BigInt twice = rem * 2;
  const int c = cmp(twice, q.get_den());
  if (c > 0 || (c == 0 && mpz_odd_p(floor_part.get_mpz_t()))) floor_part += 1;
  return floor_part;
}

struct SignificantDigits {
  bool negative = false;
  std::string digits;  // exactly `count` digits, first digit nonzero
  long exponent = 0;   // value = 0.d1d2.. * 10^(exponent + 1)
};

inline SignificantDigits significant_digits(const ExactRational& value, int count) {
  if (count < 1) throw std::invalid_argument("digit count must be positive");
  SignificantDigits out;
  out.negative = sgn(value) < 0;
  const ExactRational q = abs(value);
  long d = decimal_exponent(q);
  const long shift = count - 1 - d;
  ExactRational scaled = q;
  if (shift >= 0) {
    scaled *= ExactRational(pow10_int(static_cast<unsigned>(shift)));
  } else {
    scaled /= ExactRational(pow10_int(static_cast<unsigned>(-shift)));
  }
  BigInt m = round_half_even(scaled);
  if (m == pow10_int(static_cast<unsigned>(count))) {
    m /= 10;
    ++d;
  }
  out.digits = m.get_str();
  out.exponent = d;
  return out;
}

}  // namespace detail

/// Scientific rendering with `digits` significant digits, round-half-to-even:
/// 8.4005e-5. Zero renders as "0".
inline std::string to_scientific(const ExactRational& q, int digits = 5) {
  if (sgn(q) == 0) return "0";
  const auto sd = detail::significant_digits(q, digits);
  std::string s = sd.negative ? "-" : "";
  s += sd.digits.substr(0, 1);
  if (sd.digits.size() > 1) s += "." + sd.digits.substr(1);
  s += "e" + std::to_string(sd.exponent);
  return s;
}

/// Positional rendering with `digits` significant digits, round-half-to-even:
/// 0.078133, 0.82030. Falls back to scientific for very large or small values.
inline std::string to_decimal(const ExactRational& q, int digits = 5) {
  if (sgn(q) == 0) return "0";
  const auto sd = detail::significant_digits(q, digits);
  if (sd.exponent < -6 || sd.exponent >= digits) return to_scientific(q, digits);
  std::string s = sd.negative ? "-" : "";
  if (sd.exponent < 0) {
    s += "0." + std::string(static_cast<std::size_t>(-sd.exponent - 1), '0') + sd.digits;
  } else {
    const auto int_len = static_cast<std::size_t>(sd.exponent + 1);
    s += sd.digits.substr(0, int_len);
    if (int_len < sd.digits.size()) s += "." + sd.digits.substr(int_len);
  }
  return s;
}

/// Parses a decimal literal ("1e-11", "-0.25", "3", ".5E+2") into an exact
/// rational. Throws std::invalid_argument on malformed input.
inline ExactRational parse_decimal(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  std::string mantissa;
  long frac_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa += c;
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw std::invalid_argument("not a decimal literal: " + std::string(text));
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
    if (i == text.size()) throw std::invalid_argument("missing exponent: " + std::string(text));
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) break;
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 100000) throw std::invalid_argument("exponent too large: " + std::string(text));
    }
    if (exp_negative) exponent = -exponent;
  }
  if (i != text.size()) throw std::invalid_argument("trailing characters: " + std::string(text));
  BigInt num(mantissa, 10);
  const long e = exponent - frac_digits;
  ExactRational r = e >= 0 ? ExactRational(num * pow10_int(static_cast<unsigned>(e)))
                           : make_rational(num, pow10_int(static_cast<unsigned>(-e)));
  return negative ? ExactRational(-r) : r;
}

}  // namespace bitflip
