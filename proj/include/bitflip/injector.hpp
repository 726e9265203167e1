#pragma once

#include <bitflip/format.hpp>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace bitflip {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it plugs
/// into the standard distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += kGolden); }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent substream for sample `index` of a campaign keyed by `seed`.
  /// Depends only on (seed, index), never on how work is partitioned.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed ^ mix(index * kGolden + 0x632BE59BD9B4E019ULL)));
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t state_;
};

inline Word flip_bit(const Word& w, int pos) {
  check_position(w.format(), pos);
  return Word(w.format(), w.bits() ^ (std::uint64_t{1} << pos));
}

/// x, x' and everything needed to reason about the transition.
struct TransitionRecord {
  Word before;
  Word after;
  int position;
  FieldLocus locus;
  FpClass class_before;
  FpClass class_after;
};

inline TransitionRecord make_transition(const Word& w, int pos) {
  const Word after = flip_bit(w, pos);
  return {w, after, pos, locus_of_bit(w.format(), pos), classify(w), classify(after)};
}

/// One record per bit position, in position order 0..W-1.
inline std::vector<TransitionRecord> all_flips(const Word& w) {
  std::vector<TransitionRecord> out;
  out.reserve(static_cast<std::size_t>(w.format().total_bits()));
  for (int pos = 0; pos < w.format().total_bits(); ++pos) out.push_back(make_transition(w, pos));
  return out;
}

template <class Rng>
int random_position(const FpFormat& format, Rng& rng) {
  std::uniform_int_distribution<int> dist(0, format.total_bits() - 1);
  return dist(rng);
}

template <class Rng>
TransitionRecord random_flip(const Word& w, Rng& rng) {
  return make_transition(w, random_position(w.format(), rng));
}

}  // namespace bitflip
