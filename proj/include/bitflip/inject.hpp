#pragma once

// Fault injection into raw arrays of packed floating-point words.

#include <bitflip/format.hpp>
#include <bitflip/injector.hpp>
#include <bitflip/relerr.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace bitflip {

enum class Endian { Little, Big };

inline Endian parse_endian(std::string_view text) {
  if (text == "little") return Endian::Little;
  if (text == "big") return Endian::Big;
  throw std::invalid_argument("endian must be 'little' or 'big'");
}

inline std::string to_string(Endian e) { return e == Endian::Little ? "little" : "big"; }

struct InjectionSpec {
  enum class Mode { Count, Rate };
  Mode mode = Mode::Count;
  std::uint64_t count = 0;  // Count: exactly this many distinct (word, bit) pairs
  double rate = 0.0;        // Rate: every bit flips independently with this probability
  std::uint64_t seed = 0;
};

struct InjectedFlip {
  std::uint64_t word_index;
  std::uint64_t byte_offset;
  TransitionRecord record;
  RelativeError error;
};

struct InjectionResult {
  std::uint64_t words = 0;
  std::vector<std::uint8_t> data;
  std::vector<InjectedFlip> flips;
};

inline std::size_t word_bytes(const FpFormat& format) {
  if (format.total_bits() % 8 != 0) throw std::invalid_argument("format width is not a whole number of bytes");
  return static_cast<std::size_t>(format.total_bits() / 8);
}

inline std::uint64_t load_word(std::span<const std::uint8_t> bytes, Endian endian) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::size_t b = endian == Endian::Little ? bytes.size() - 1 - i : i;
    v = (v << 8) | bytes[b];
  }
  return v;
}

inline void store_word(std::span<std::uint8_t> bytes, std::uint64_t v, Endian endian) {
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::size_t b = endian == Endian::Little ? i : bytes.size() - 1 - i;
    bytes[b] = static_cast<std::uint8_t>(v & 0xFF);
    v >>= 8;
  }
}

/// Flat bit indices (word * W + bit) to flip, ascending.
inline std::vector<std::uint64_t> choose_flips(std::uint64_t total_bits, const InjectionSpec& spec) {
  SplitMix64 rng(spec.seed);
  std::vector<std::uint64_t> out;
  if (spec.mode == InjectionSpec::Mode::Count) {
    if (spec.count > total_bits) throw std::invalid_argument("flip count exceeds the number of bits in the input");
    // Floyd's sampling without replacement.
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = total_bits - spec.count; j < total_bits; ++j) {
      std::uniform_int_distribution<std::uint64_t> dist(0, j);
      const std::uint64_t t = dist(rng);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    out.assign(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) throw std::invalid_argument("rate must lie in [0, 1]");
  if (spec.rate == 0.0 || total_bits == 0) return out;
  if (spec.rate == 1.0) {
    out.resize(total_bits);
    std::iota(out.begin(), out.end(), std::uint64_t{0});
    return out;
  }
  std::geometric_distribution<std::uint64_t> gap(spec.rate);
  for (std::uint64_t pos = gap(rng); pos < total_bits; pos += 1 + gap(rng)) out.push_back(pos);
  return out;
}

/// Flips are applied in ascending (word, bit) order; when one word takes
/// several flips each record starts from the word as left by the previous one.
inline InjectionResult inject_faults(std::span<const std::uint8_t> input, const FpFormat& format, Endian endian,
                                     const InjectionSpec& spec) {
  const std::size_t width = word_bytes(format);
  if (input.size() % width != 0)
    throw std::invalid_argument("input size " + std::to_string(input.size()) + " is not a multiple of " +
                                std::to_string(width) + " bytes");
  InjectionResult result;
  result.words = input.size() / width;
  result.data.assign(input.begin(), input.end());
  const auto bits_per_word = static_cast<std::uint64_t>(format.total_bits());
  for (std::uint64_t flat : choose_flips(result.words * bits_per_word, spec)) {
    const std::uint64_t index = flat / bits_per_word;
    const int bit = static_cast<int>(flat % bits_per_word);
    std::span<std::uint8_t> bytes(result.data.data() + index * width, width);
    const Word before(format, load_word(bytes, endian));
    TransitionRecord rec = make_transition(before, bit);
    store_word(bytes, rec.after.bits(), endian);
    RelativeError err = relative_error(rec.before, rec.after);
    result.flips.push_back({index, index * width, std::move(rec), std::move(err)});
  }
  return result;
}

}  // namespace bitflip
