#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nmrl/abstraction.hpp"
#include "nmrl/errors.hpp"
#include "nmrl/rmax/rmax.hpp"
#include "nmrl/rng.hpp"

namespace nmrl::rmax {
namespace {

const std::vector<double> kRewards{0.0, 100.0};

RmaxParams params(std::uint64_t m0 = 10) {
  RmaxParams p;
  p.m0 = m0;
  return p;
}

AbstractState safe(std::uint32_t id) { return AbstractState{id, NodeKind::Safe}; }

class VersionedAbstraction final : public PartialAbstraction {
 public:
  std::optional<AbstractState> lookup(HistoryView) const override { return safe(0); }
  std::uint64_t version() const override { return version_; }
  std::size_t num_safe() const override { return num_safe_; }
  std::uint64_t version_ = 0;
  std::size_t num_safe_ = 1;
};

TEST(Rmax, EmptyModelIsOptimistic) {
  RmaxModel m(3, kRewards, params());
  m.reset(2, 0);
  for (std::uint32_t s = 0; s < 2; ++s) {
    for (std::uint32_t a = 0; a < 3; ++a) EXPECT_DOUBLE_EQ(m.q(s, ActionId{a}), 1098.9);
  }
  EXPECT_EQ(m.choose(safe(1)), ActionId{0});
  EXPECT_EQ(m.known_pairs(), 0u);
}

TEST(Rmax, RewardingSelfLoopConvergesToDiscountedSum) {
  RmaxModel m(1, kRewards, params());
  m.reset(1, 0);
  for (int i = 0; i < 10; ++i) m.observe(safe(0), ActionId{0}, RewardId{1}, NextState::safe(0));
  EXPECT_TRUE(m.dirty());
  m.plan();
  EXPECT_NEAR(m.q(0, ActionId{0}), 100.0 / (1.0 - 0.909), 1e-2);
  EXPECT_GT(m.plan_stats().sweeps, 1u);
}

TEST(Rmax, TerminatedAndFrontierOutcomes) {
  RmaxModel m(2, kRewards, params());
  m.reset(1, 0);
  for (int i = 0; i < 10; ++i) m.observe(safe(0), ActionId{0}, RewardId{0}, NextState::terminated());
  for (int i = 0; i < 10; ++i) m.observe(safe(0), ActionId{1}, RewardId{0}, NextState::frontier());
  m.plan();
  EXPECT_DOUBLE_EQ(m.q(0, ActionId{0}), 0.0);
  EXPECT_NEAR(m.q(0, ActionId{1}), 0.909 * 1098.9, 1e-9);
  EXPECT_EQ(m.choose(safe(0)), ActionId{1});
}

TEST(Rmax, OutOfRangeSafeTargetCountsAsFrontier) {
  RmaxModel m(1, kRewards, params(1));
  m.reset(1, 0);
  m.observe(safe(0), ActionId{0}, RewardId{0}, NextState::safe(4));
  ASSERT_EQ(m.pair(0, ActionId{0}).outcomes.size(), 1u);
  EXPECT_EQ(m.pair(0, ActionId{0}).outcomes[0].next, NextState::frontier());
}

TEST(Rmax, PairBecomesKnownAtM0) {
  RmaxModel m(2, kRewards, params(5));
  m.reset(1, 0);
  for (int i = 0; i < 4; ++i) m.observe(safe(0), ActionId{0}, RewardId{0}, NextState::terminated());
  EXPECT_FALSE(m.pair(0, ActionId{0}).known);
  EXPECT_FALSE(m.dirty());
  m.observe(safe(0), ActionId{0}, RewardId{0}, NextState::terminated());
  EXPECT_TRUE(m.pair(0, ActionId{0}).known);
  // choose() replans: the known pair is worth 0, so the unknown one wins.
  EXPECT_EQ(m.choose(safe(0)), ActionId{1});
  EXPECT_FALSE(m.dirty());
  EXPECT_EQ(m.known_pairs(), 1u);
}

TEST(Rmax, MixedOutcomes) {
  RmaxModel m(1, kRewards, params(2));
  m.reset(1, 0);
  m.observe(safe(0), ActionId{0}, RewardId{1}, NextState::terminated());
  m.observe(safe(0), ActionId{0}, RewardId{0}, NextState::safe(0));
  m.plan();
  // q = 0.5·100 + 0.5·γ·q
  EXPECT_NEAR(m.q(0, ActionId{0}), 50.0 / (1.0 - 0.5 * 0.909), 1e-2);
}

TEST(Rmax, UnknownStatesAreRejected) {
  RmaxModel m(1, kRewards, params());
  m.reset(2, 0);
  EXPECT_THROW(m.observe(safe(2), ActionId{0}, RewardId{0}, NextState::terminated()), UnknownStateError);
  EXPECT_THROW(m.observe(AbstractState{0, NodeKind::Candidate}, ActionId{0}, RewardId{0}, NextState::terminated()),
               UnknownStateError);
  EXPECT_THROW((void)m.choose(safe(5)), UnknownStateError);
}

TEST(Rmax, UpdateResetsOnlyOnVersionOrSizeChange) {
  RmaxModel m(1, kRewards, params(1));
  VersionedAbstraction alpha;
  EXPECT_TRUE(m.update(alpha));
  EXPECT_EQ(m.resets(), 1u);
  m.observe(safe(0), ActionId{0}, RewardId{1}, NextState::terminated());
  EXPECT_FALSE(m.update(alpha));
  EXPECT_EQ(m.pair(0, ActionId{0}).count, 1u);
  alpha.version_ = 1;
  alpha.num_safe_ = 2;
  EXPECT_TRUE(m.update(alpha));
  EXPECT_EQ(m.resets(), 2u);
  EXPECT_EQ(m.num_states(), 2u);
  EXPECT_EQ(m.version(), 1u);
  EXPECT_EQ(m.pair(0, ActionId{0}).count, 0u);
  m.reset(3, 7);  // direct resets are not counted
  EXPECT_EQ(m.resets(), 2u);
}

TEST(Rmax, ResetGivesAFreshModel) {
  RmaxModel used(2, kRewards, params(1)), fresh(2, kRewards, params(1));
  used.reset(2, 0);
  used.observe(safe(1), ActionId{1}, RewardId{1}, NextState::safe(0));
  used.plan();
  used.reset(2, 3);
  fresh.reset(2, 3);
  EXPECT_TRUE(used.same_model(fresh));
}

TEST(Rmax, NonConvergenceIsReported) {
  RmaxParams p = params(1);
  p.max_sweeps = 2;
  RmaxModel m(1, kRewards, p);
  m.reset(1, 0);
  m.observe(safe(0), ActionId{0}, RewardId{1}, NextState::safe(0));
  EXPECT_THROW(m.plan(), NonConvergenceError);
}

TEST(Rmax, ParamsValidation) {
  RmaxParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.tolerance(), 1e-4 * (1.0 - 0.909));
  p.gamma = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.m0 = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.v_max = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

// Planning on random fully known models against a long independent value
// iteration.
TEST(Rmax, PlanMatchesReferenceValueIteration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::uint32_t states = 1 + static_cast<std::uint32_t>(rng.below(4));
    const std::uint32_t actions = 1 + static_cast<std::uint32_t>(rng.below(3));
    RmaxParams p = params(3);
    p.vi_tolerance = 1e-10;
    RmaxModel m(actions, kRewards, p);
    m.reset(states, 0);
    struct Sample {
      NextState next;
      RewardId reward;
    };
    std::vector<std::vector<Sample>> samples(states * actions);
    for (std::uint32_t s = 0; s < states; ++s) {
      for (std::uint32_t a = 0; a < actions; ++a) {
        for (int i = 0; i < 3; ++i) {
          const auto kind = rng.below(3);
          const NextState next = kind == 0 ? NextState::terminated()
                                 : kind == 1 ? NextState::frontier()
                                             : NextState::safe(static_cast<std::uint32_t>(rng.below(states)));
          const RewardId r{static_cast<std::uint32_t>(rng.below(2))};
          m.observe(safe(s), ActionId{a}, r, next);
          samples[s * actions + a].push_back(Sample{next, r});
        }
      }
    }
    m.plan();
    std::vector<double> v(states, 0.0), q(states * actions, 0.0);
    for (int sweep = 0; sweep < 20000; ++sweep) {
      for (std::size_t i = 0; i < q.size(); ++i) {
        double total = 0.0;
        for (const auto& smp : samples[i]) {
          double next = 0.0;
          if (smp.next.kind == NextState::Kind::Frontier) next = p.v_max;
          if (smp.next.kind == NextState::Kind::Safe) next = v[smp.next.id];
          total += kRewards[smp.reward.index] + p.gamma * next;
        }
        q[i] = total / static_cast<double>(samples[i].size());
      }
      for (std::uint32_t s = 0; s < states; ++s) {
        v[s] = *std::max_element(q.begin() + s * actions, q.begin() + (s + 1) * actions);
      }
    }
    for (std::uint32_t s = 0; s < states; ++s) {
      for (std::uint32_t a = 0; a < actions; ++a) {
        EXPECT_NEAR(m.q(s, ActionId{a}), q[s * actions + a], 1e-6) << "seed " << seed;
      }
    }
  }
}

}  // namespace
}  // namespace nmrl::rmax
