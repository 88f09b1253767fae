#include <gtest/gtest.h>

#include "nmrl/abstraction.hpp"
#include "nmrl/errors.hpp"
#include "nmrl/induced_mdp.hpp"
#include "nmrl/oracles/dynamics.hpp"
#include "nmrl/tabular.hpp"
#include "support.hpp"

namespace nmrl {
namespace {

TotalAbstraction parity_abstraction() { return TotalAbstraction{2, [](HistoryView h) { return testing::parity_of(h); }}; }

TEST(DynamicsRow, NormalizeMergesAndDrops) {
  DynamicsRow row;
  row.outcomes = {{ObservationId{1}, RewardId{0}, 0.25}, {ObservationId{0}, RewardId{1}, 0.0},
                  {ObservationId{1}, RewardId{0}, 0.25}, {ObservationId{0}, RewardId{0}, 0.5}};
  row.normalize_layout();
  ASSERT_EQ(row.outcomes.size(), 2u);
  EXPECT_EQ(row.outcomes[0].observation, ObservationId{0});
  EXPECT_DOUBLE_EQ(row.probability(ObservationId{1}, RewardId{0}), 0.5);
  EXPECT_DOUBLE_EQ(row.total(), 1.0);
}

TEST(DynamicsRow, DistanceCoversBothSupports) {
  DynamicsRow a;
  a.outcomes = {{ObservationId{0}, RewardId{0}, 1.0}};
  DynamicsRow b;
  b.outcomes = {{ObservationId{1}, RewardId{0}, 0.6}};
  b.termination = 0.4;
  EXPECT_DOUBLE_EQ(row_distance(a, b), 1.0);
  EXPECT_DOUBLE_EQ(row_distance(a, a), 0.0);
}

TEST(TabularNmdp, EnumeratesEveryReachableHistory) {
  const auto table = TabularNmdp::enumerate(testing::parity_signature(), 3, testing::parity_generator());
  // Per step: 2 actions × 2 observations, reward determined by (a, o).
  EXPECT_EQ(table.histories().size(), 1u + 4u + 16u + 64u);
  EXPECT_TRUE(table.histories().front().empty());
  for (const auto& h : table.histories()) {
    for (std::uint32_t a = 0; a < 2; ++a) {
      const auto& row = table.row(h, ActionId{a});
      EXPECT_NEAR(row.total(), 1.0, 1e-12);
      if (table.truncated(h)) {
        EXPECT_DOUBLE_EQ(row.termination, 1.0);
      }
    }
  }
  const History outside{{ActionId{0}, ObservationId{1}, RewardId{0}}};  // reward inconsistent with (a, o)
  EXPECT_FALSE(table.contains(outside));
  EXPECT_THROW((void)table.row(outside, ActionId{0}), std::out_of_range);
}

TEST(TabularNmdp, BudgetAndRowChecks) {
  EXPECT_THROW((void)TabularNmdp::enumerate(testing::parity_signature(), 3, testing::parity_generator(), 10),
               BudgetExceededError);
  const TabularNmdp::Generator leaky = [](HistoryView, ActionId) {
    DynamicsRow row;
    row.outcomes = {{ObservationId{0}, RewardId{0}, 0.5}};
    return row;
  };
  EXPECT_THROW((void)TabularNmdp::enumerate(testing::parity_signature(), 2, leaky), std::invalid_argument);
  const TabularNmdp::Generator foreign = [](HistoryView, ActionId) {
    DynamicsRow row;
    row.outcomes = {{ObservationId{7}, RewardId{0}, 1.0}};
    return row;
  };
  EXPECT_THROW((void)TabularNmdp::enumerate(testing::parity_signature(), 2, foreign), std::invalid_argument);
}

TEST(Marginalize, MarkovAbstractionGivesExactRows) {
  const auto table = TabularNmdp::enumerate(testing::parity_signature(), 4, testing::parity_generator());
  const auto mdp = marginalize(table, parity_abstraction());
  ASSERT_EQ(mdp.num_states(), 2u);
  for (std::size_t s = 0; s < 2; ++s) {
    const double p1 = s == 1 ? 0.8 : 0.2;
    const auto& row = mdp.row(s, ActionId{0});
    ASSERT_TRUE(row.has_value());
    EXPECT_NEAR(row->probability(static_cast<std::uint32_t>(1 - s), RewardId{1}), p1, 1e-12);
    EXPECT_NEAR(row->probability(static_cast<std::uint32_t>(s), RewardId{0}), 1.0 - p1, 1e-12);
    EXPECT_DOUBLE_EQ(row->termination, 0.0);
  }
}

TEST(Marginalize, LastObservationIsNotMarkovForParity) {
  const auto table = TabularNmdp::enumerate(testing::parity_signature(), 3, testing::parity_generator());
  EXPECT_THROW((void)marginalize(table, last_observation_abstraction(table.signature())), NotMarkovError);
}

TEST(Marginalize, CoarseAbstractionIsNotMarkov) {
  const auto table = TabularNmdp::enumerate(testing::parity_signature(), 3, testing::parity_generator());
  EXPECT_THROW((void)marginalize(table, TotalAbstraction{1, [](HistoryView) { return std::size_t{0}; }}),
               NotMarkovError);
}

TEST(InducedMdp, FiniteHorizonValuesMatchHistoryOracle) {
  for (std::size_t horizon = 1; horizon <= 5; ++horizon) {
    const auto table = TabularNmdp::enumerate(testing::parity_signature(), horizon, testing::parity_generator());
    const auto mdp = marginalize(table, parity_abstraction());
    const oracles::ValueOracle oracle(table);
    EXPECT_NEAR(mdp.finite_horizon_values(horizon)[0], oracle.value({}), 1e-12) << "horizon " << horizon;
  }
}

TEST(InducedMdp, SetRowRejectsNonDistributions) {
  InducedMdp mdp(2, 1, {0.0, 1.0});
  MdpRow row;
  row.outcomes = {{0, RewardId{0}, 0.7}};
  EXPECT_THROW(mdp.set_row(0, ActionId{0}, row), std::invalid_argument);
  row.termination = 0.3;
  EXPECT_NO_THROW(mdp.set_row(0, ActionId{0}, row));
  EXPECT_TRUE(mdp.has_rows(0));
  EXPECT_FALSE(mdp.has_rows(1));
  EXPECT_THROW(mdp.set_row(2, ActionId{0}, row), std::out_of_range);
}

TEST(InducedMdp, TotalRewardOfTerminatingChain) {
  // State 0 pays 1 and moves to 1; state 1 pays 1 and terminates w.p. 1/2.
  InducedMdp mdp(2, 1, {0.0, 1.0});
  mdp.set_row(0, ActionId{0}, MdpRow{{{1, RewardId{1}, 1.0}}, 0.0});
  mdp.set_row(1, ActionId{0}, MdpRow{{{1, RewardId{1}, 0.5}}, 0.5});
  const auto q = mdp.total_reward_q_values();
  // V(1) = 0.5·(1 + V(1)) + 0.5·0 → V(1) = 1; V(0) = 1 + V(1) = 2.
  EXPECT_NEAR(q[1][0], 1.0, 1e-9);
  EXPECT_NEAR(q[0][0], 2.0, 1e-9);
}

TEST(Abstraction, StarStopsAtFirstUndefinedStep) {
  struct Prefix final : PartialAbstraction {
    std::optional<AbstractState> lookup(HistoryView h) const override {
      if (h.size() > 2) return std::nullopt;
      return AbstractState{static_cast<std::uint32_t>(h.size()), NodeKind::Safe};
    }
    std::size_t num_safe() const override { return 3; }
  } alpha;
  History h(4, StepSymbol{ActionId{1}, ObservationId{0}, RewardId{0}});
  const auto star = apply_abstraction_star(alpha, h);
  ASSERT_TRUE(star.initial.has_value());
  EXPECT_EQ(star.steps.size(), 2u);
  ASSERT_TRUE(star.undefined_at.has_value());
  EXPECT_EQ(*star.undefined_at, 2u);
  EXPECT_EQ(star.steps[1].state.id, 2u);

  const MarkovPolicy policy = [](AbstractState s) -> std::optional<ActionId> { return ActionId{s.id % 2}; };
  const auto lifted = epsilon_optimal_lift(policy, alpha);
  EXPECT_EQ(lifted(HistoryView(h).first(1)), ActionId{1});
  EXPECT_FALSE(lifted(h).has_value());
}

}  // namespace
}  // namespace nmrl
