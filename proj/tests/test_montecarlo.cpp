#include <bitflip/montecarlo.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace bitflip;
using C = FpClass;

namespace {

const FpFormat b64 = FpFormat::binary64();

CampaignReport campaign(const FpFormat& f, C c, std::uint64_t n, std::uint64_t seed, unsigned workers,
                        Convention conv = Convention::PaperCompat) {
  return run_campaign(CampaignConfig{f, c, n, seed, conv}, workers);
}

}  // namespace

TEST(SampleWord, ClassMembership) {
  SplitMix64 rng(8);
  for (const FpFormat& f : {b64, FpFormat::binary32(), FpFormat(2, 1), FpFormat(4, 3)})
    for (C c : kAllClasses)
      for (int i = 0; i < 2000; ++i) ASSERT_EQ(classify(sample_word(c, f, rng)), c) << f.name();
}

TEST(SampleWord, InfinityBothSigns) {
  SplitMix64 rng(3);
  int neg = 0;
  for (int i = 0; i < 1000; ++i) {
    const Word w = sample_word(C::Inf, b64, rng);
    ASSERT_TRUE(w.bits() == 0x7FF0000000000000u || w.bits() == 0xFFF0000000000000u);
    neg += decode_fields(w).sign;
  }
  EXPECT_GT(neg, 400);
  EXPECT_LT(neg, 600);
}

TEST(SampleWord, NormalizedExponentUniformChiSquare) {
  // 2046 exponent cells, df = 2045; the 99.9% quantile is 2248.34.
  constexpr double kCritical = 2248.34;
  constexpr int kDraws = 1000000;
  SplitMix64 rng(77);
  std::vector<std::uint64_t> counts(2047, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[decode_fields(sample_word(C::Normalized, b64, rng)).exponent];
  EXPECT_EQ(counts[0], 0u);
  const double expected = kDraws / 2046.0;
  double chi2 = 0;
  for (std::size_t e = 1; e <= 2046; ++e) {
    const double d = static_cast<double>(counts[e]) - expected;
    chi2 += d * d / expected;
  }
  EXPECT_LT(chi2, kCritical);
}

TEST(Campaign, SingleSample) {
  const auto r = campaign(b64, C::Normalized, 1, 5, 1);
  EXPECT_EQ(r.tally.cases, 1u);
  std::uint64_t total = 0;
  for (auto& row : r.tally.transitions)
    for (auto v : row) total += v;
  EXPECT_EQ(total, 1u);
}

TEST(Campaign, IndependentOfWorkerCount) {
  const auto a = campaign(b64, C::Normalized, 30001, 42, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const auto b = campaign(b64, C::Normalized, 30001, 42, w);
    EXPECT_EQ(a.tally.transitions, b.tally.transitions);
    EXPECT_EQ(a.tally.buckets, b.tally.buckets);
    EXPECT_EQ(a.tally.dyadic, b.tally.dyadic);
  }
  const auto c = campaign(b64, C::Normalized, 30001, 43, 1);
  EXPECT_NE(a.tally.dyadic, c.tally.dyadic);
}

TEST(Campaign, ConvergesAtFourSigma) {
  for (std::uint64_t n : {100000u, 1000000u})
    for (C c : kAllClasses)
      for (Convention conv : {Convention::PaperCompat, Convention::Separated}) {
        const auto r = campaign(b64, c, n, 1000 + n, 0, conv);
        const auto cmp = compare(analytic_model(b64, conv), r, 4.0);
        EXPECT_TRUE(cmp.passed) << to_string(c) << " n=" << n;
        for (const auto& cell : cmp.cells)
          if (cell.status == "fail") ADD_FAILURE() << cell.name << " z=" << cell.z;
      }
}

TEST(Census, HandCountedFourThree) {
  const FpFormat f(4, 3);
  const auto r = exhaustive_census(f, C::Normalized, Convention::PaperCompat, 1);
  EXPECT_EQ(r.class_size, 224);
  EXPECT_EQ(r.tally.cases, 224u * 8u);
  EXPECT_EQ(r.frequency(r.tally.transitions[0][class_index(C::Normalized)]), make_rational(13, 14));
  EXPECT_EQ(r.frequency(r.tally.transitions[0][class_index(C::Denormalized)]), make_rational(1, 28));
  EXPECT_EQ(r.frequency(r.tally.transitions[0][class_index(C::NaN)]), make_rational(1, 32));
  EXPECT_EQ(r.frequency(r.tally.transitions[0][class_index(C::Inf)]), make_rational(1, 224));
  EXPECT_EQ(r.frequency(r.tally.bucket(ErrorBucket::AtLeastOne)), make_rational(85, 224));
  EXPECT_EQ(r.frequency(r.tally.bucket(ErrorBucket::BetweenHalfAndOne)), make_rational(43, 224));
  EXPECT_EQ(r.frequency(r.tally.bucket(ErrorBucket::AtMostHalf)), make_rational(3, 7));
}

TEST(Census, MatchesAnalyticOnEverySmallFormat) {
  std::vector<FpFormat> formats = bitflip::testing::small_formats();
  formats.push_back(FpFormat::binary16());
  for (const FpFormat& f : formats)
    for (C c : kAllClasses)
      for (Convention conv : {Convention::PaperCompat, Convention::Separated}) {
        const auto census = exhaustive_census(f, c, conv);
        const auto cmp = compare(analytic_model(f, conv), census);
        EXPECT_TRUE(cmp.passed) << f.name() << " " << to_string(c) << " " << to_string(conv);
        for (const auto& cell : cmp.cells)
          if (cell.status != "equal")
            ADD_FAILURE() << f.name() << " " << cell.name << " expected " << to_exact_string(cell.expected)
                          << " observed " << to_exact_string(cell.observed);
      }
}

TEST(Census, MatchesAnalyticForEveryFormatUpTo16Bits) {
  // One enumeration per (format, class); the paper-compat tally is the
  // separated tally with non-finite folded into ">= 1".
  for (int w = 4; w <= 16; ++w)
    for (int we = 2; we <= w - 2; ++we) {
      const FpFormat f(we, w - 1 - we);
      for (C c : kAllClasses) {
        const CensusReport separated = exhaustive_census(f, c, Convention::Separated);
        CensusReport folded = separated;
        folded.convention = Convention::PaperCompat;
        folded.tally.apply_convention(Convention::PaperCompat);
        EXPECT_TRUE(compare(analytic_model(f, Convention::Separated), separated).passed) << f.name() << to_string(c);
        EXPECT_TRUE(compare(analytic_model(f, Convention::PaperCompat), folded).passed) << f.name() << to_string(c);
      }
    }
}

TEST(Census, RowsSumToOne) {
  for (const FpFormat& f : bitflip::testing::small_formats())
    for (C c : kAllClasses) {
      const auto r = exhaustive_census(f, c, Convention::Separated);
      std::uint64_t row = 0;
      for (auto v : r.tally.transitions[class_index(c)]) row += v;
      EXPECT_EQ(row, r.tally.cases);
      EXPECT_EQ(BigInt(static_cast<unsigned long>(r.tally.cases)), r.class_size * f.total_bits());
    }
}

TEST(Census, BucketsPartitionDefinedErrors) {
  for (const FpFormat& f : bitflip::testing::small_formats())
    for (C c : {C::Normalized, C::Denormalized}) {
      const auto r = exhaustive_census(f, c, Convention::PaperCompat);
      const auto& t = r.tally;
      EXPECT_EQ(t.bucket(ErrorBucket::NonFinite), 0u);
      EXPECT_EQ(t.bucket(ErrorBucket::AtLeastOne) + t.bucket(ErrorBucket::BetweenHalfAndOne) +
                    t.bucket(ErrorBucket::AtMostHalf),
                t.cases - t.bucket(ErrorBucket::Undefined));
    }
}

TEST(Census, ThresholdBoundsBracketTrueProbability) {
  // Direct count of Pr(err <= tol) over every normalized word and position.
  std::vector<FpFormat> formats = bitflip::testing::small_formats();
  formats.push_back(FpFormat::binary16());
  for (const FpFormat& f : formats)
    for (const char* tol_text : {"0.25", "0.2", "1e-1", "0.0625", "3e-2", "1e-2", "1e-3"}) {
      const ExactRational tol = parse_decimal(tol_text);
      ThresholdBounds b;
      try {
        b = decimal_threshold_bounds(f, tol);
      } catch (const BelowResolutionError&) {
        continue;
      }
      std::uint64_t hits = 0;
      std::uint64_t total = 0;
      for (std::uint64_t bits = 0; bits <= f.word_mask(); ++bits) {
        const Word w(f, bits);
        if (classify(w) != C::Normalized) continue;
        for (int p = 0; p < f.total_bits(); ++p) {
          ++total;
          const auto e = relative_error(w, p);
          if (e.is_finite() && e.value() <= tol) ++hits;
        }
      }
      const ExactRational truth =
          make_rational(BigInt(static_cast<unsigned long>(hits)), BigInt(static_cast<unsigned long>(total)));
      EXPECT_LE(b.lower_bound, truth) << f.name() << " " << tol_text;
      EXPECT_LE(truth, b.upper_bound) << f.name() << " " << tol_text;
    }
}

TEST(Census, Guards) {
  EXPECT_THROW(exhaustive_census(b64, C::Normalized, Convention::PaperCompat), std::length_error);
  EXPECT_THROW(exhaustive_census(FpFormat(8, 16), C::Normalized, Convention::PaperCompat), std::length_error);
}

TEST(Compare, RejectsMismatchedModel) {
  const auto r = exhaustive_census(FpFormat(4, 3), C::Normalized, Convention::PaperCompat);
  EXPECT_THROW(compare(analytic_model(FpFormat(4, 4), Convention::PaperCompat), r), std::invalid_argument);
  EXPECT_THROW(compare(analytic_model(FpFormat(4, 3), Convention::Separated), r), std::invalid_argument);
  const auto s = campaign(b64, C::Normalized, 100, 1, 1);
  EXPECT_THROW(compare(analytic_model(FpFormat::binary32(), Convention::PaperCompat), s), std::invalid_argument);
}

TEST(Compare, DetectsWrongModel) {
  auto model = analytic_model(FpFormat(4, 3), Convention::PaperCompat);
  model.matrix.cells[0][0] -= make_rational(1, 1000);
  EXPECT_FALSE(compare(model, exhaustive_census(FpFormat(4, 3), C::Normalized, Convention::PaperCompat)).passed);
}
