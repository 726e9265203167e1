#pragma once

// Bit-level model of parameterized binary floating-point formats:
// field split, class, exact decoded value and field/bit-position mapping.

#include <bitflip/rational.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace bitflip {

/// Widest exponent field supported. Exact relative errors of exponent flips
/// reach 2^(2^(exponent_bits-1)), so the exponent width bounds integer size.
inline constexpr int kMaxExponentBits = 24;

/// Binary interchange-style layout: sign, exponent_bits, fraction_bits.
class FpFormat {
 public:
  constexpr FpFormat(int exponent_bits, int fraction_bits)
      : exponent_bits_(exponent_bits), fraction_bits_(fraction_bits) {
    if (exponent_bits < 2 || fraction_bits < 1)
      throw std::invalid_argument("format needs exponent_bits >= 2 and fraction_bits >= 1");
    if (exponent_bits > kMaxExponentBits)
      throw std::invalid_argument("exponent field wider than " + std::to_string(kMaxExponentBits) + " bits");
    if (total_bits() > 64) throw std::invalid_argument("format wider than 64 bits");
  }

  static constexpr FpFormat binary64() { return {11, 52}; }
  static constexpr FpFormat binary32() { return {8, 23}; }
  static constexpr FpFormat binary16() { return {5, 10}; }

  constexpr int exponent_bits() const { return exponent_bits_; }
  constexpr int fraction_bits() const { return fraction_bits_; }
  constexpr int total_bits() const { return 1 + exponent_bits_ + fraction_bits_; }
  constexpr std::int64_t bias() const { return (std::int64_t{1} << (exponent_bits_ - 1)) - 1; }

  /// All-ones biased exponent (NaN/Inf).
  constexpr std::uint64_t exponent_all_ones() const { return (std::uint64_t{1} << exponent_bits_) - 1; }
  constexpr std::uint64_t fraction_mask() const { return (std::uint64_t{1} << fraction_bits_) - 1; }
  constexpr std::uint64_t word_mask() const {
    return total_bits() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << total_bits()) - 1;
  }

  /// "binary64", "binary32", "binary16", or "we,wf".
  std::string name() const {
    if (*this == binary64()) return "binary64";
    if (*this == binary32()) return "binary32";
    if (*this == binary16()) return "binary16";
    return std::to_string(exponent_bits_) + "," + std::to_string(fraction_bits_);
  }

  friend constexpr bool operator==(const FpFormat&, const FpFormat&) = default;

 private:
  int exponent_bits_;
  int fraction_bits_;
};

/// Accepts the names produced by FpFormat::name().
inline FpFormat parse_format(std::string_view text) {
  if (text == "binary64") return FpFormat::binary64();
  if (text == "binary32") return FpFormat::binary32();
  if (text == "binary16") return FpFormat::binary16();
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("unknown format: " + std::string(text));
  auto parse_int = [&](std::string_view s) {
    if (s.empty() || s.size() > 3 || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw std::invalid_argument("bad format width in: " + std::string(text));
    return std::stoi(std::string(s));
  };
  return FpFormat(parse_int(text.substr(0, comma)), parse_int(text.substr(comma + 1)));
}

/// A bit pattern interpreted under a format.
class Word {
 public:
  Word(FpFormat format, std::uint64_t bits) : format_(format), bits_(bits) {
    if ((bits & ~format.word_mask()) != 0) throw std::out_of_range("bit pattern wider than format");
  }

  const FpFormat& format() const { return format_; }
  std::uint64_t bits() const { return bits_; }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  FpFormat format_;
  std::uint64_t bits_;
};

struct Fields {
  unsigned sign = 0;
  std::uint64_t exponent = 0;
  std::uint64_t fraction = 0;

  friend bool operator==(const Fields&, const Fields&) = default;
};

inline Fields decode_fields(const Word& w) {
  const auto& f = w.format();
  return {static_cast<unsigned>(w.bits() >> (f.total_bits() - 1)),
          (w.bits() >> f.fraction_bits()) & f.exponent_all_ones(),
          w.bits() & f.fraction_mask()};
}

inline Word recompose(FpFormat format, const Fields& fields) {
  if (fields.sign > 1 || fields.exponent > format.exponent_all_ones() || fields.fraction > format.fraction_mask())
    throw std::out_of_range("field value does not fit the format");
  return Word(format, (std::uint64_t{fields.sign} << (format.total_bits() - 1)) |
                          (fields.exponent << format.fraction_bits()) | fields.fraction);
}

enum class FpClass { Normalized, Denormalized, NaN, Inf };

inline constexpr FpClass kAllClasses[] = {FpClass::Normalized, FpClass::Denormalized, FpClass::NaN,
                                          FpClass::Inf};

inline std::string to_string(FpClass c) {
  switch (c) {
    case FpClass::Normalized: return "normalized";
    case FpClass::Denormalized: return "denormalized";
    case FpClass::NaN: return "nan";
    case FpClass::Inf: return "inf";
  }
  return "?";
}

inline FpClass parse_class(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (FpClass c : kAllClasses)
    if (lower == to_string(c)) return c;
  if (lower == "normal") return FpClass::Normalized;
  if (lower == "subnormal" || lower == "denormal") return FpClass::Denormalized;
  throw std::invalid_argument("unknown class: " + std::string(text));
}

/// ±0 is Denormalized.
inline FpClass classify(const Word& w) {
  const Fields f = decode_fields(w);
  if (f.exponent == w.format().exponent_all_ones()) return f.fraction != 0 ? FpClass::NaN : FpClass::Inf;
  if (f.exponent == 0) return FpClass::Denormalized;
  return FpClass::Normalized;
}

inline bool is_zero(const Word& w) {
  const Fields f = decode_fields(w);
  return f.exponent == 0 && f.fraction == 0;
}

/// sign * significand * 2^scale, exactly. The significand has at most
/// fraction_bits + 1 bits.
struct FiniteValue {
  bool negative = false;
  std::uint64_t significand = 0;
  std::int64_t scale = 0;

  ExactRational to_rational() const {
    ExactRational r = ExactRational(BigInt(static_cast<unsigned long>(significand))) * pow2(scale);
    return negative ? ExactRational(-r) : r;
  }
};

enum class NonFinite { NaN, PosInf, NegInf };

using ExactValue = std::variant<FiniteValue, NonFinite>;

inline ExactValue decode_value(const Word& w) {
  const auto& fmt = w.format();
  const Fields f = decode_fields(w);
  switch (classify(w)) {
    case FpClass::NaN: return NonFinite::NaN;
    case FpClass::Inf: return f.sign ? NonFinite::NegInf : NonFinite::PosInf;
    case FpClass::Denormalized:
      return FiniteValue{f.sign != 0, f.fraction, 1 - fmt.bias() - fmt.fraction_bits()};
    case FpClass::Normalized:
      return FiniteValue{f.sign != 0, (std::uint64_t{1} << fmt.fraction_bits()) | f.fraction,
                         static_cast<std::int64_t>(f.exponent) - fmt.bias() - fmt.fraction_bits()};
  }
  return NonFinite::NaN;
}

enum class Field { Sign, Exponent, Fraction };

inline std::string to_string(Field f) {
  switch (f) {
    case Field::Sign: return "sign";
    case Field::Exponent: return "exponent";
    case Field::Fraction: return "fraction";
  }
  return "?";
}

/// Field plus 1-based in-field index; index 1 is the field's most significant
/// bit. The sign locus always has index 1.
struct FieldLocus {
  Field field = Field::Sign;
  int index = 1;

  static FieldLocus sign() { return {Field::Sign, 1}; }
  static FieldLocus exponent(int k) { return {Field::Exponent, k}; }
  static FieldLocus fraction(int k) { return {Field::Fraction, k}; }

  friend bool operator==(const FieldLocus&, const FieldLocus&) = default;
};

inline std::string to_string(const FieldLocus& l) {
  if (l.field == Field::Sign) return "sign";
  return to_string(l.field) + "(" + std::to_string(l.index) + ")";
}

inline void check_position(const FpFormat& format, int pos) {
  if (pos < 0 || pos >= format.total_bits())
    throw std::out_of_range("bit position " + std::to_string(pos) + " outside [0, " +
                            std::to_string(format.total_bits()) + ")");
}

/// Position 0 is the least significant bit of the word.
inline FieldLocus locus_of_bit(const FpFormat& format, int pos) {
  check_position(format, pos);
  const int top = format.total_bits() - 1;
  if (pos == top) return FieldLocus::sign();
  if (pos >= format.fraction_bits()) return FieldLocus::exponent(top - pos);
  return FieldLocus::fraction(format.fraction_bits() - pos);
}

inline int bit_of_locus(const FpFormat& format, const FieldLocus& locus) {
  const int top = format.total_bits() - 1;
  switch (locus.field) {
    case Field::Sign:
      return top;
    case Field::Exponent:
      if (locus.index < 1 || locus.index > format.exponent_bits()) throw std::out_of_range("exponent index");
      return top - locus.index;
    case Field::Fraction:
      if (locus.index < 1 || locus.index > format.fraction_bits()) throw std::out_of_range("fraction index");
      return format.fraction_bits() - locus.index;
  }
  throw std::out_of_range("bad locus");
}

/// Index (MSB = 1) of the first set fraction bit; empty when the fraction is 0.
inline std::optional<int> first_nonzero_fraction_entry(const Word& w) {
  const std::uint64_t f = decode_fields(w).fraction;
  if (f == 0) return std::nullopt;
  return w.format().fraction_bits() - (static_cast<int>(std::bit_width(f)) - 1);
}

/// Upper-case hex, zero padded to ceil(W/4) digits: 0x3FF0000000000000.
inline std::string to_hex(const Word& w) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  const int n = (w.format().total_bits() + 3) / 4;
  std::string s(static_cast<std::size_t>(n), '0');
  std::uint64_t v = w.bits();
  for (int i = n - 1; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return "0x" + s;
}

/// Parses "0x..." (case-insensitive, at most ceil(W/4) digits).
inline Word parse_hex_word(const FpFormat& format, std::string_view text) {
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
    throw std::invalid_argument("hex word must start with 0x: " + std::string(text));
  const auto digits = text.substr(2);
  if (digits.size() > static_cast<std::size_t>((format.total_bits() + 3) / 4))
    throw std::invalid_argument("too many hex digits for format: " + std::string(text));
  std::uint64_t v = 0;
  for (char c : digits) {
    const int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                  : (c >= 'a' && c <= 'f')                    ? c - 'a' + 10
                  : (c >= 'A' && c <= 'F')                    ? c - 'A' + 10
                                                              : -1;
    if (d < 0) throw std::invalid_argument("bad hex digit in: " + std::string(text));
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  if ((v & ~format.word_mask()) != 0) throw std::invalid_argument("hex word wider than format: " + std::string(text));
  return Word(format, v);
}

/// Correctly rounded (ties to even) encoding of an exact value. Overflow
/// rounds to Inf.
inline Word encode_nearest(const FpFormat& format, const ExactRational& value, bool negative_zero = false) {
  const int s = sgn(value);
  const std::uint64_t sign_bit = std::uint64_t{1} << (format.total_bits() - 1);
  if (s == 0) return Word(format, negative_zero ? sign_bit : 0);
  const ExactRational mag = abs(value);
  // floor(log2(mag)) from bit lengths, then corrected exactly.
  std::int64_t e = static_cast<std::int64_t>(mpz_sizeinbase(mag.get_num_mpz_t(), 2)) -
                   static_cast<std::int64_t>(mpz_sizeinbase(mag.get_den_mpz_t(), 2));
  while (pow2(e) > mag) --e;
  while (pow2(e + 1) <= mag) ++e;
  const std::int64_t min_normal_exp = 1 - format.bias();
  const std::int64_t scale = std::max(e, min_normal_exp) - format.fraction_bits();
  BigInt m = detail::round_half_even(mag / pow2(scale));
  // Significand overflow into the next binade is absorbed by the field carry:
  // bits = ((exp_field) << wf) + (m - implicit), which stays correct when m
  // reaches 2^(wf+1) or a subnormal rounds up to the smallest normal.
  std::uint64_t magnitude_bits;
  if (e < min_normal_exp) {
    magnitude_bits = m.get_ui();
  } else {
    const std::int64_t biased = e + format.bias();
    magnitude_bits = (static_cast<std::uint64_t>(biased) << format.fraction_bits()) +
                     (m.get_ui() - (std::uint64_t{1} << format.fraction_bits()));
  }
  const std::uint64_t inf_bits = format.exponent_all_ones() << format.fraction_bits();
  if (e + format.bias() >= static_cast<std::int64_t>(format.exponent_all_ones()) || magnitude_bits >= inf_bits)
    magnitude_bits = inf_bits;
  return Word(format, (s < 0 ? sign_bit : 0) | magnitude_bits);
}

/// Accepts a hex bit pattern, a decimal literal (rounded to nearest), or
/// inf/-inf/nan (canonical quiet NaN).
inline Word parse_word(const FpFormat& format, std::string_view text) {
  if (text.size() > 1 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) return parse_hex_word(format, text);
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  const std::uint64_t sign_bit = std::uint64_t{1} << (format.total_bits() - 1);
  const std::uint64_t inf_bits = format.exponent_all_ones() << format.fraction_bits();
  if (lower == "inf" || lower == "+inf" || lower == "infinity") return Word(format, inf_bits);
  if (lower == "-inf" || lower == "-infinity") return Word(format, sign_bit | inf_bits);
  if (lower == "nan") return Word(format, inf_bits | (std::uint64_t{1} << (format.fraction_bits() - 1)));
  const ExactRational v = parse_decimal(text);
  return encode_nearest(format, v, !text.empty() && text[0] == '-');
}

}  // namespace bitflip
