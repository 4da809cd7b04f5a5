#include <gtest/gtest.h>

#include <numeric>

#include "cachecast/channel.hpp"
#include "support/properties.hpp"

using namespace cachecast;

namespace {

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return errc::bad_config;
}

}  // namespace

TEST(ValidateStats, AcceptsDecreasingRow) {
  auto s = validate_stats({{0.5, 0.4, 0.3}});
  EXPECT_EQ(s.num_users(), 1);
  EXPECT_EQ(s.num_levels(), 3);
  EXPECT_DOUBLE_EQ(s.ccdf(0, 2), 0.4);
}

TEST(ValidateStats, AcceptsPerfectChannel) { EXPECT_NO_THROW(validate_stats({{1, 1, 1}})); }

TEST(ValidateStats, RejectsIncreasingRow) {
  EXPECT_EQ(code_of([] { validate_stats({{0.4, 0.5, 0.3}}); }), errc::not_monotone);
}

TEST(ValidateStats, RejectsOutOfRangeEntries) {
  EXPECT_EQ(code_of([] { validate_stats({{1.2, 0.5}}); }), errc::out_of_range);
  EXPECT_EQ(code_of([] { validate_stats({{0.5, -0.1}}); }), errc::out_of_range);
  EXPECT_EQ(code_of([] { validate_stats({}); }), errc::out_of_range);
}

TEST(ValidateStats, RejectsRaggedGrid) {
  EXPECT_EQ(code_of([] { validate_stats({{0.5, 0.4}, {0.5}}); }), errc::length_mismatch);
}

TEST(ValidateStats, ToleratesRoundingNoise) {
  EXPECT_NO_THROW(validate_stats({{0.3, 0.3 + 1e-13}}));
}

TEST(Pmf, TelescopesExampleRow) {
  auto p = pmf_from_ccdf(validate_stats({{0.5, 0.4, 0.3}}), 0);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.1, 1e-15);
  EXPECT_NEAR(p[2], 0.1, 1e-15);
  EXPECT_NEAR(p[3], 0.3, 1e-15);
}

TEST(Pmf, DeterministicChannels) {
  EXPECT_EQ(pmf_from_ccdf(validate_stats({{1, 1, 1}}), 0), (std::vector<double>{0, 0, 0, 1}));
  EXPECT_EQ(pmf_from_ccdf(validate_stats({{0, 0, 0}}), 0), (std::vector<double>{1, 0, 0, 0}));
}

TEST(Pmf, SumsToOne) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto s = props::random_stats(rng, 1, 1 + i % 7);
    auto p = pmf_from_ccdf(s, 0);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
}

TEST(Dominance, DegradedPairFromFirstExample) {
  std::vector<double> a{0.9, 0.6, 0.5}, b{0.7, 0.5, 0.4};
  EXPECT_TRUE(is_stochastically_dominant(a, b));
  EXPECT_FALSE(is_stochastically_dominant(b, a));
}

TEST(Dominance, ReflexiveWithTies) {
  std::vector<double> a{0.9, 0.6, 0.5};
  EXPECT_TRUE(is_stochastically_dominant(a, a));
}

TEST(Dominance, CrossingRowsAreIncomparable) {
  std::vector<double> a{0.9, 0.3, 0.3}, b{0.5, 0.5, 0.5};
  EXPECT_FALSE(is_stochastically_dominant(a, b));
  EXPECT_FALSE(is_stochastically_dominant(b, a));
}

TEST(Dominance, LengthMismatch) {
  std::vector<double> a{0.9, 0.3}, b{0.5};
  EXPECT_EQ(code_of([&] { is_stochastically_dominant(a, b); }), errc::length_mismatch);
}

TEST(Enhance, DegradedInputWithEqualWeightsIsUnchanged) {
  auto s = validate_stats({{0.5, 0.4, 0.3}, {0.7, 0.5, 0.4}, {0.9, 0.6, 0.5}});
  std::vector<double> w{1, 1, 1};
  auto e = enhance(s, w);
  EXPECT_EQ(e.stats.rows(), s.rows());
  EXPECT_TRUE(e.zero_weight_users.empty());
}

TEST(Enhance, HandWorkedTwoUserCase) {
  auto s = validate_stats({{0.7, 0.4, 0.4}, {0.5, 0.5, 0.5}});
  std::vector<double> w{1.25, 1};
  auto e = enhance(s, w).stats;
  EXPECT_NEAR(e.ccdf(1, 1), 0.875, 1e-15);
  EXPECT_NEAR(e.ccdf(1, 2), 0.5, 1e-15);
  EXPECT_NEAR(e.ccdf(1, 3), 0.5, 1e-15);
  EXPECT_EQ(e.row(0), s.row(0));
}

TEST(Enhance, ZeroWeightUserIsLeftAlone) {
  auto s = validate_stats({{0.7, 0.4, 0.4}, {0.5, 0.5, 0.5}});
  std::vector<double> w{1, 0};
  auto e = enhance(s, w);
  EXPECT_EQ(e.stats.rows(), s.rows());
  EXPECT_EQ(e.zero_weight_users, std::vector<int>{1});
}

TEST(Enhance, CapsAtOne) {
  auto s = validate_stats({{0.9}, {0.2}});
  std::vector<double> w{3, 1};
  EXPECT_DOUBLE_EQ(enhance(s, w).stats.ccdf(1, 1), 1.0);
}

TEST(Enhance, RejectsUnsortedWeights) {
  auto s = validate_stats({{0.7}, {0.5}});
  std::vector<double> w{1, 2};
  EXPECT_EQ(code_of([&] { enhance(s, w); }), errc::weights_unsorted);
}

TEST(EnhanceProperty, InvariantsHoldOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const int users = 2 + trial % 5, levels = 1 + trial % 6;
    auto s = props::random_stats(rng, users, levels, 0.3);
    auto w = props::random_sorted_weights(rng, users);
    auto failures = props::enhancement_violations(s, w);
    ASSERT_TRUE(failures.empty()) << "trial " << trial << ": " << failures.front();
  }
}

TEST(SampleStates, DeterministicChannels) {
  auto ones = sample_states(validate_stats({{1, 1, 1}}), 500, 9);
  for (int v : ones.levels[0]) EXPECT_EQ(v, 3);
  auto zeros = sample_states(validate_stats({{0, 0, 0}}), 500, 9);
  for (int v : zeros.levels[0]) EXPECT_EQ(v, 0);
}

TEST(SampleStates, SameSeedSameStates) {
  auto s = validate_stats({{0.5, 0.4, 0.3}, {0.7, 0.5, 0.4}});
  EXPECT_EQ(sample_states(s, 1000, 42).levels, sample_states(s, 1000, 42).levels);
  EXPECT_NE(sample_states(s, 1000, 42).levels, sample_states(s, 1000, 43).levels);
}

TEST(SampleStates, UsersDrawIndependentStreams) {
  auto s = validate_stats({{0.5, 0.4, 0.3}, {0.5, 0.4, 0.3}});
  auto r = sample_states(s, 1000, 1);
  EXPECT_NE(r.levels[0], r.levels[1]);
}

TEST(SampleStates, EmpiricalCcdfWithinThreeSigma) {
  auto s = validate_stats({{0.5, 0.4, 0.3}});
  const std::size_t n = 100000;
  auto r = sample_states(s, n, 2024);
  for (int l = 1; l <= 3; ++l) {
    const double p = s.ccdf(0, l);
    const double hits = std::count_if(r.levels[0].begin(), r.levels[0].end(), [&](int v) { return v >= l; });
    EXPECT_NEAR(hits / n, p, 3 * std::sqrt(p * (1 - p) / n)) << "level " << l;
  }
}

TEST(SampleStates, RejectsZeroUses) {
  EXPECT_EQ(code_of([] { sample_states(validate_stats({{0.5}}), 0, 1); }), errc::out_of_range);
}
