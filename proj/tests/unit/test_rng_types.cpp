#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

#include "nmrl/rng.hpp"
#include "nmrl/types.hpp"

namespace nmrl {
namespace {

TEST(Rng, SameStreamSameDraws) {
  Rng a = make_stream(7, StreamPurpose::TrainEnvironment, 42);
  Rng b = make_stream(7, StreamPurpose::TrainEnvironment, 42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, StreamsDifferByEveryCoordinate) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (std::uint64_t purpose = 1; purpose <= 4; ++purpose) {
      for (std::uint64_t index = 0; index < 16; ++index) firsts.insert(Rng::stream(seed, purpose, index).next());
    }
  }
  EXPECT_EQ(firsts.size(), 4u * 4u * 16u);
}

TEST(Rng, KnownSplitMixOutput) {
  // Reference value of SplitMix64 started from counter 0.
  Rng r(0);
  EXPECT_EQ(r.next(), 0xe220a8397b1dcdafULL);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(123);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng r(9);
  std::array<int, 3> counts{};
  const int n = 90000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(3);
    ASSERT_LT(v, 3u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 3, 5 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
  EXPECT_EQ(r.below(1), 0u);
  EXPECT_EQ(r.below(0), 0u);
}

TEST(Signature, RewardLookupAndValidation) {
  Signature sig{2, 3, {0.0, 100.0}, std::nullopt};
  EXPECT_NO_THROW(sig.validate());
  EXPECT_EQ(sig.reward_id(100.0), RewardId{1});
  EXPECT_THROW((void)sig.reward_id(5.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(sig.max_reward(), 100.0);
  EXPECT_TRUE(sig.valid(StepSymbol{ActionId{1}, ObservationId{2}, RewardId{1}}));
  EXPECT_FALSE(sig.valid(StepSymbol{ActionId{2}, ObservationId{0}, RewardId{0}}));

  Signature bad = sig;
  bad.rewards = {-1.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = sig;
  bad.num_actions = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = sig;
  bad.blank_observation = ObservationId{3};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace nmrl
