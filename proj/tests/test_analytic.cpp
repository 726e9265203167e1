#include <bitflip/analytic.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

using namespace bitflip;
using C = FpClass;

namespace {
const FpFormat b64 = FpFormat::binary64();
}

TEST(TransitionMatrix, Binary64PrintedValues) {
  const auto m = transition_matrix(b64);
  const char* expected[4][4] = {{"9.9983e-1", "8.4005e-5", "8.4005e-5", "1.8653e-20"},
                                {"1.7188e-1", "8.2812e-1", "0", "0"},
                                {"1.7188e-1", "0", "8.2812e-1", "1.8041e-16"},
                                {"1.7188e-1", "0", "8.1250e-1", "1.5625e-2"}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_EQ(to_scientific(m.cells[i][j], 5), expected[i][j]) << to_string(kAllClasses[i]) << "->" << to_string(kAllClasses[j]);
}

TEST(TransitionMatrix, Binary64ExactEntries) {
  const auto m = transition_matrix(b64);
  EXPECT_EQ(m(C::Inf, C::NaN), make_rational(52, 64));
  EXPECT_EQ(m(C::Inf, C::Normalized), make_rational(11, 64));
  EXPECT_EQ(m(C::Denormalized, C::Denormalized), make_rational(53, 64));
  EXPECT_EQ(m(C::Normalized, C::NaN), make_rational(11, 2046) * make_rational(1, 64) * (1 - pow2(-52)));
  EXPECT_EQ(m(C::Normalized, C::Denormalized), make_rational(11, 2046) * make_rational(1, 64));
  EXPECT_EQ(m(C::Normalized, C::Normalized), 1 - make_rational(22, 2046) * make_rational(1, 64));
  EXPECT_EQ(m(C::NaN, C::Inf), ExactRational(52) / (pow2(52) - 1) / 64);
  EXPECT_EQ(m(C::Denormalized, C::Inf), 0);
}

TEST(TransitionMatrix, SmallFormatValues) {
  // Hand count for (4,3): 2 of 14 exponents x 1/8 positions leave the class.
  EXPECT_EQ(transition_matrix(FpFormat(4, 3))(C::Normalized, C::Normalized), make_rational(13, 14));
  EXPECT_EQ(transition_matrix(FpFormat(5, 10))(C::Normalized, C::Normalized), make_rational(47, 48));
}

TEST(TransitionMatrix, RowsSumToOneAndEntriesInUnitInterval) {
  for (int we = 2; we <= 24; ++we)
    for (int wf : {1, 2, 3, 10, 23, 52}) {
      if (1 + we + wf > 64) continue;
      const FpFormat f(we, wf);
      const auto m = transition_matrix(f);
      for (C from : kAllClasses) {
        EXPECT_EQ(m.row_sum(from), 1) << f.name();
        for (C to : kAllClasses) {
          EXPECT_GE(m(from, to), 0);
          EXPECT_LE(m(from, to), 1);
        }
      }
    }
}

TEST(IntervalProbabilities, Binary64PaperCompat) {
  const auto p = interval_probabilities(b64, Convention::PaperCompat);
  const ExactRational to_zero = make_rational(11, 2046) * make_rational(1, 64) * pow2(-52);
  const ExactRational half = make_rational(1022, 2046) * make_rational(1, 64);
  EXPECT_EQ(p.ge_1, make_rational(13, 128) + to_zero);
  EXPECT_EQ(p.between_half_and_1, make_rational(11, 128) - half - to_zero);
  EXPECT_EQ(p.le_half, make_rational(52, 64) + half);
  EXPECT_EQ(to_decimal(p.ge_1, 5), "0.10156");
  EXPECT_EQ(to_decimal(p.between_half_and_1, 5), "0.078133");
  EXPECT_EQ(to_decimal(p.le_half, 5), "0.82030");
  EXPECT_EQ(p.nonfinite, 0);
  EXPECT_EQ(p.total(), 1);
}

TEST(IntervalProbabilities, SeparatedMovesNonFiniteMass) {
  const auto pc = interval_probabilities(b64, Convention::PaperCompat);
  const auto s = interval_probabilities(b64, Convention::Separated);
  EXPECT_EQ(s.nonfinite, make_rational(11, 2046) * make_rational(1, 64));
  EXPECT_EQ(s.ge_1 + s.nonfinite, pc.ge_1);
  EXPECT_EQ(s.le_half, pc.le_half);
  EXPECT_EQ(s.total(), 1);
}

TEST(IntervalProbabilities, PartitionForManyFormats) {
  for (int we = 2; we <= 12; ++we)
    for (int wf = 1; wf <= 20; wf += 3)
      for (Convention c : {Convention::PaperCompat, Convention::Separated}) {
        const auto p = interval_probabilities(FpFormat(we, wf), c);
        EXPECT_EQ(p.total(), 1);
        EXPECT_GE(p.between_half_and_1, 0);
      }
}

TEST(CdfDyadic, Values) {
  EXPECT_EQ(cdf_dyadic(b64, 2), make_rational(51, 64));
  EXPECT_EQ(cdf_dyadic(b64, 10), make_rational(43, 64));
  EXPECT_EQ(cdf_dyadic(b64, 52), make_rational(1, 64));
  EXPECT_EQ(cdf_dyadic(FpFormat(4, 3), 2), make_rational(2, 8));
  EXPECT_THROW(cdf_dyadic(b64, 1), std::out_of_range);
  EXPECT_THROW(cdf_dyadic(b64, 53), std::out_of_range);
  for (int i = 2; i < 52; ++i) EXPECT_GT(cdf_dyadic(b64, i), cdf_dyadic(b64, i + 1));
}

TEST(ThresholdBounds, SummaryValues) {
  const auto b11 = decimal_threshold_bounds(b64, parse_decimal("1e-11"));
  EXPECT_EQ(b11.upper_bound, make_rational(17, 64));
  EXPECT_EQ(b11.lower_bound, make_rational(16, 64));
  EXPECT_EQ(b11.upper_index, 36);
  EXPECT_EQ(b11.lower_index, 37);
  const auto b6 = decimal_threshold_bounds(b64, parse_decimal("1e-6"));
  EXPECT_EQ(b6.upper_bound, make_rational(34, 64));
  EXPECT_EQ(b6.lower_bound, make_rational(33, 64));
  EXPECT_GT(b6.lower_bound, make_rational(1, 2));
  EXPECT_EQ(decimal_threshold_bounds(b64, parse_decimal("1e-1")).upper_bound, make_rational(50, 64));
}

TEST(ThresholdBounds, ExactPowerOfTwoCollapses) {
  const auto b = decimal_threshold_bounds(b64, make_rational(1, 1024));
  EXPECT_EQ(b.lower_index, 10);
  EXPECT_EQ(b.upper_index, 10);
  EXPECT_EQ(b.lower_bound, b.upper_bound);
}

TEST(ThresholdBounds, Errors) {
  EXPECT_THROW(decimal_threshold_bounds(b64, make_rational(1, 2)), std::out_of_range);
  EXPECT_THROW(decimal_threshold_bounds(b64, ExactRational(0)), std::out_of_range);
  EXPECT_THROW(decimal_threshold_bounds(b64, ExactRational(-1, 8)), std::out_of_range);
  EXPECT_NO_THROW(decimal_threshold_bounds(b64, make_rational(1, 4)));
  EXPECT_THROW(decimal_threshold_bounds(FpFormat::binary16(), parse_decimal("1e-6")), BelowResolutionError);
  EXPECT_THROW(decimal_threshold_bounds(b64, parse_decimal("1e-17")), BelowResolutionError);
}

TEST(ToleranceTable, Binary64UpperBounds) {
  const int numerators[15] = {50, 47, 44, 40, 37, 34, 30, 27, 24, 20, 17, 14, 10, 7, 4};
  const char* printed[15] = {"0.78125", "0.73438", "0.68750", "0.62500", "0.57812", "0.53125", "0.46875", "0.42188",
                             "0.37500", "0.31250", "0.26562", "0.21875", "0.15625", "0.10938", "0.062500"};
  const auto rows = tolerance_table(b64);
  ASSERT_EQ(rows.size(), 15u);
  for (std::size_t m = 0; m < 15; ++m) {
    EXPECT_EQ(rows[m].tolerance, make_rational(BigInt(1), pow10_int(static_cast<unsigned>(m + 1))));
    EXPECT_EQ(rows[m].upper_bound, make_rational(numerators[m], 64)) << "10^-" << m + 1;
    EXPECT_EQ(to_decimal(rows[m].upper_bound, 5), printed[m]);
    EXPECT_TRUE(rows[m].resolvable);
    EXPECT_LE(rows[m].lower_bound, rows[m].upper_bound);
    if (m > 0) {
      EXPECT_LE(rows[m].upper_bound, rows[m - 1].upper_bound);
    }
  }
}

TEST(ToleranceTable, SmallFormatRowsBelowResolution) {
  const auto rows = tolerance_table(FpFormat::binary16());
  EXPECT_TRUE(rows[2].resolvable);   // 1e-3 >= 2^-10
  EXPECT_FALSE(rows[3].resolvable);  // 1e-4 < 2^-10
  EXPECT_EQ(rows[14].upper_bound, 0);
  EXPECT_EQ(rows[14].lower_bound, 0);
}
