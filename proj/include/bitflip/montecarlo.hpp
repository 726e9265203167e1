#pragma once

// Empirical validation of the closed forms: seeded Monte Carlo campaigns and
// exhaustive censuses over every word of a small format.

#include <bitflip/analytic.hpp>
#include <bitflip/format.hpp>
#include <bitflip/injector.hpp>
#include <bitflip/relerr.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bitflip {

inline constexpr int kMaxCensusBits = 24;

/// Number of bit patterns in a class.
inline BigInt class_size(const FpFormat& format, FpClass c) {
  const BigInt fractions = pow2(format.fraction_bits()).get_num();
  switch (c) {
    case FpClass::Normalized: return 2 * (pow2(format.exponent_bits()).get_num() - 2) * fractions;
    case FpClass::Denormalized: return 2 * fractions;
    case FpClass::NaN: return 2 * (fractions - 1);
    case FpClass::Inf: return 2;
  }
  return 0;
}

/// Uniform over the bit patterns of class `c`.
template <class Rng>
Word sample_word(FpClass c, const FpFormat& format, Rng& rng) {
  std::uniform_int_distribution<unsigned> sign_dist(0, 1);
  const unsigned sign = sign_dist(rng);
  Fields f{sign, 0, 0};
  switch (c) {
    case FpClass::Normalized: {
      std::uniform_int_distribution<std::uint64_t> e(1, format.exponent_all_ones() - 1);
      std::uniform_int_distribution<std::uint64_t> m(0, format.fraction_mask());
      f.exponent = e(rng);
      f.fraction = m(rng);
      break;
    }
    case FpClass::Denormalized: {
      std::uniform_int_distribution<std::uint64_t> m(0, format.fraction_mask());
      f.fraction = m(rng);
      break;
    }
    case FpClass::NaN: {
      std::uniform_int_distribution<std::uint64_t> m(1, format.fraction_mask());
      f.exponent = format.exponent_all_ones();
      f.fraction = m(rng);
      break;
    }
    case FpClass::Inf:
      f.exponent = format.exponent_all_ones();
      break;
  }
  return recompose(format, f);
}

/// Raw counts shared by campaigns and censuses. Bucket counts are stored in
/// Separated form; apply_convention folds non-finite into ">= 1".
struct Tally {
  std::uint64_t cases = 0;
  std::array<std::array<std::uint64_t, 4>, 4> transitions{};
  std::array<std::uint64_t, 5> buckets{};  // indexed by ErrorBucket
  std::vector<std::uint64_t> dyadic;       // dyadic[j]: errors with dyadic_index == j, j in [0, wf]; wf+1 means "finer"

  explicit Tally(const FpFormat& format) : dyadic(static_cast<std::size_t>(format.fraction_bits()) + 2, 0) {}

  void add(const TransitionRecord& rec, const RelativeError& err) {
    ++cases;
    ++transitions[class_index(rec.class_before)][class_index(rec.class_after)];
    ++buckets[static_cast<std::size_t>(bucket_of(err))];
    if (err.is_finite()) {
      const std::int64_t idx = dyadic_index(err.value());
      if (idx >= 0) ++dyadic[static_cast<std::size_t>(std::min<std::int64_t>(idx, static_cast<std::int64_t>(dyadic.size()) - 1))];
    }
  }

  void merge(const Tally& other) {
    cases += other.cases;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) transitions[i][j] += other.transitions[i][j];
    for (std::size_t i = 0; i < buckets.size(); ++i) buckets[i] += other.buckets[i];
    for (std::size_t i = 0; i < dyadic.size(); ++i) dyadic[i] += other.dyadic[i];
  }

  std::uint64_t bucket(ErrorBucket b) const { return buckets[static_cast<std::size_t>(b)]; }

  /// Count of errors <= 2^-i.
  std::uint64_t cdf_count(std::int64_t i) const {
    std::uint64_t n = 0;
    for (std::size_t j = static_cast<std::size_t>(std::max<std::int64_t>(i, 0)); j < dyadic.size(); ++j) n += dyadic[j];
    return n;
  }

  void apply_convention(Convention c) {
    if (c != Convention::PaperCompat) return;
    buckets[static_cast<std::size_t>(ErrorBucket::AtLeastOne)] += bucket(ErrorBucket::NonFinite);
    buckets[static_cast<std::size_t>(ErrorBucket::NonFinite)] = 0;
  }
};

struct CampaignConfig {
  FpFormat format = FpFormat::binary64();
  FpClass source_class = FpClass::Normalized;
  std::uint64_t sample_count = 1;
  std::uint64_t seed = 0;
  Convention convention = Convention::PaperCompat;
};

struct CampaignReport {
  CampaignConfig config;
  Tally tally;
};

struct CensusReport {
  FpFormat format;
  FpClass source_class;
  Convention convention;
  BigInt class_size;
  Tally tally;

  /// Exact frequency of a count over all class_size * W cases.
  ExactRational frequency(std::uint64_t count) const {
    return make_rational(BigInt(static_cast<unsigned long>(count)), BigInt(static_cast<unsigned long>(tally.cases)));
  }
};

namespace detail {

inline unsigned resolve_workers(unsigned workers, std::uint64_t items) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::clamp<std::uint64_t>(items, 1, workers));
}

// Splits [0, n) into contiguous chunks, one Tally per chunk, merged in order.
template <class Body>
Tally parallel_tally(const FpFormat& format, std::uint64_t n, unsigned workers, Body body) {
  workers = resolve_workers(workers, n);
  std::vector<Tally> parts(workers, Tally(format));
  std::vector<std::thread> threads;
  const std::uint64_t chunk = n / workers;
  const std::uint64_t extra = n % workers;
  std::uint64_t begin = 0;
  for (unsigned t = 0; t < workers; ++t) {
    const std::uint64_t end = begin + chunk + (t < extra ? 1 : 0);
    if (t + 1 == workers) {
      body(begin, end, parts[t]);
    } else {
      threads.emplace_back([&, begin, end, t] { body(begin, end, parts[t]); });
    }
    begin = end;
  }
  for (auto& th : threads) th.join();
  Tally total(format);
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

/// Sample i draws its word and flip position from its own substream of the
/// seed, so the report does not depend on `workers` (0 = hardware threads).
inline CampaignReport run_campaign(const CampaignConfig& config, unsigned workers = 0) {
  if (config.sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  Tally tally = detail::parallel_tally(
      config.format, config.sample_count, workers, [&](std::uint64_t begin, std::uint64_t end, Tally& out) {
        for (std::uint64_t i = begin; i < end; ++i) {
          SplitMix64 rng = SplitMix64::substream(config.seed, i);
          const Word w = sample_word(config.source_class, config.format, rng);
          const TransitionRecord rec = random_flip(w, rng);
          out.add(rec, relative_error(rec.before, rec.after));
        }
      });
  tally.apply_convention(config.convention);
  return {config, std::move(tally)};
}

/// Every word of the class times every flip position, each with equal weight.
inline CensusReport exhaustive_census(const FpFormat& format, FpClass source_class, Convention convention,
                                      unsigned workers = 0) {
  if (format.total_bits() > kMaxCensusBits)
    throw std::length_error("census limited to formats of at most " + std::to_string(kMaxCensusBits) + " bits");
  std::uint64_t exp_lo = 0;
  std::uint64_t exp_count = 1;
  std::uint64_t frac_lo = 0;
  std::uint64_t frac_count = format.fraction_mask() + 1;
  switch (source_class) {
    case FpClass::Normalized:
      exp_lo = 1;
      exp_count = format.exponent_all_ones() - 1;
      break;
    case FpClass::Denormalized:
      break;
    case FpClass::NaN:
      exp_lo = format.exponent_all_ones();
      frac_lo = 1;
      frac_count -= 1;
      break;
    case FpClass::Inf:
      exp_lo = format.exponent_all_ones();
      frac_count = 1;
      break;
  }
  const std::uint64_t members = 2 * exp_count * frac_count;
  Tally tally = detail::parallel_tally(format, members, workers, [&](std::uint64_t begin, std::uint64_t end, Tally& out) {
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const Fields f{static_cast<unsigned>(idx / (exp_count * frac_count)),
                     exp_lo + (idx / frac_count) % exp_count, frac_lo + idx % frac_count};
      const Word w = recompose(format, f);
      for (int pos = 0; pos < format.total_bits(); ++pos) {
        const TransitionRecord rec = make_transition(w, pos);
        out.add(rec, relative_error(rec.before, rec.after));
      }
    }
  });
  tally.apply_convention(convention);
  return {format, source_class, convention, class_size(format, source_class), std::move(tally)};
}

/// The closed-form side of a comparison.
struct AnalyticModel {
  FpFormat format;
  Convention convention;
  TransitionMatrix matrix;
  IntervalProbabilities intervals;
};

inline AnalyticModel analytic_model(const FpFormat& format, Convention convention) {
  return {format, convention, transition_matrix(format), interval_probabilities(format, convention)};
}

struct ComparisonCell {
  std::string name;
  ExactRational expected;
  ExactRational observed;
  std::uint64_t count = 0;
  double z = 0.0;          // campaigns only
  std::string status;      // equal | unequal | pass | fail | skipped
};

struct ComparisonReport {
  bool exact = false;  // census comparison
  double sigma = 0.0;
  bool passed = true;
  std::vector<ComparisonCell> cells;
};

namespace detail {

struct Expectation {
  std::string name;
  ExactRational p;
  std::uint64_t count;
};

inline std::vector<Expectation> expectations(const AnalyticModel& model, FpClass source, const Tally& t) {
  std::vector<Expectation> out;
  for (FpClass to : kAllClasses)
    out.push_back({"transition." + to_string(source) + "->" + to_string(to), model.matrix(source, to),
                   t.transitions[class_index(source)][class_index(to)]});

  // Only the zero words have an undefined error among finite sources.
  ExactRational undefined = 1;
  if (source == FpClass::Normalized) undefined = 0;
  if (source == FpClass::Denormalized) undefined = pow2(-model.format.fraction_bits());
  out.push_back({"bucket.undefined", undefined, t.bucket(ErrorBucket::Undefined)});

  if (source != FpClass::Normalized) return out;
  const auto& iv = model.intervals;
  out.push_back({"bucket.ge_1", iv.ge_1, t.bucket(ErrorBucket::AtLeastOne)});
  out.push_back({"bucket.between_half_and_1", iv.between_half_and_1, t.bucket(ErrorBucket::BetweenHalfAndOne)});
  out.push_back({"bucket.le_half", iv.le_half, t.bucket(ErrorBucket::AtMostHalf)});
  out.push_back({"bucket.nonfinite", iv.nonfinite, t.bucket(ErrorBucket::NonFinite)});
  for (std::int64_t i = 2; i <= model.format.fraction_bits(); ++i)
    out.push_back({"cdf.2^-" + std::to_string(i), cdf_dyadic(model.format, i), t.cdf_count(i)});
  return out;
}

inline void check_match(const AnalyticModel& model, const FpFormat& format, Convention convention) {
  if (!(model.format == format)) throw std::invalid_argument("comparison across different formats");
  if (model.convention != convention) throw std::invalid_argument("comparison across different conventions");
}

}  // namespace detail

/// Exact rational equality per cell.
inline ComparisonReport compare(const AnalyticModel& model, const CensusReport& census) {
  detail::check_match(model, census.format, census.convention);
  ComparisonReport r;
  r.exact = true;
  for (auto& e : detail::expectations(model, census.source_class, census.tally)) {
    ComparisonCell c{e.name, e.p, census.frequency(e.count), e.count, 0.0, ""};
    c.status = c.expected == c.observed ? "equal" : "unequal";
    r.passed = r.passed && c.status == "equal";
    r.cells.push_back(std::move(c));
  }
  return r;
}

/// Binomial z-score per cell. Cells with 0 < p <= min_probability are
/// reported but not judged; p = 0 or p = 1 cells must match exactly.
inline ComparisonReport compare(const AnalyticModel& model, const CampaignReport& campaign, double sigma = 4.0,
                                double min_probability = 1e-6) {
  detail::check_match(model, campaign.config.format, campaign.config.convention);
  const auto n = campaign.tally.cases;
  ComparisonReport r;
  r.sigma = sigma;
  for (auto& e : detail::expectations(model, campaign.config.source_class, campaign.tally)) {
    ComparisonCell c{e.name, e.p,
                     make_rational(BigInt(static_cast<unsigned long>(e.count)), BigInt(static_cast<unsigned long>(n))),
                     e.count, 0.0, ""};
    const double p = c.expected.get_d();
    if (sgn(c.expected) == 0 || c.expected == 1) {
      c.status = c.observed == c.expected ? "pass" : "fail";
    } else if (p <= min_probability) {
      c.status = "skipped";
    } else {
      const double freq = static_cast<double>(e.count) / static_cast<double>(n);
      c.z = (freq - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(n));
      c.status = std::abs(c.z) <= sigma ? "pass" : "fail";
    }
    if (c.status == "fail") r.passed = false;
    r.cells.push_back(std::move(c));
  }
  return r;
}

}  // namespace bitflip
