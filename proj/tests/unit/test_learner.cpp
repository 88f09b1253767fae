#include <gtest/gtest.h>

#include <cmath>

#include "nmrl/envs/domain.hpp"
#include "nmrl/errors.hpp"
#include "nmrl/learner/learner.hpp"
#include "nmrl/orchestrator/run.hpp"
#include "support.hpp"

namespace nmrl::learner {
namespace {

TEST(Threshold, SmallClosedForm) {
  // 16 · ln(2 · 2 / 0.5) = 16 · ln 8 = 33.27...
  EXPECT_EQ(sample_size_threshold(1.0, 0.5, 1.0), 34u);
}

TEST(Threshold, RotatingBanditDefaults) {
  LearnerParams p;
  p.mu = 0.35;
  p.delay = 1;
  p.n_max = 10;
  p.delta_a = orchestrator::split_confidence(0.2, 10).learner;
  const std::uint32_t alphabet = 2 * 2 * 2;  // 2 arms × 2 observations × 2 rewards
  const double prefixes = alphabet + 1.0;
  const double delta_test = 0.1 / (2.0 * 10 * (10 * alphabet + 1));
  const double expected = std::ceil(16.0 / (0.35 * 0.35) * std::log(2.0 * (prefixes + 1.0) / delta_test));
  EXPECT_EQ(sample_size_threshold(p, alphabet), static_cast<std::uint64_t>(expected));
  EXPECT_EQ(sample_size_threshold(p, alphabet), 1658u);
}

TEST(Threshold, PrefixCounts) {
  EXPECT_DOUBLE_EQ(future_prefix_count(8, 1), 9.0);
  EXPECT_DOUBLE_EQ(future_prefix_count(2, 2), 2.0 + 4.0 + 1.0 + 2.0);
  EXPECT_DOUBLE_EQ(future_prefix_count(3, 3), 3.0 + 9.0 + 27.0 + 1.0 + 3.0 + 9.0);
}

TEST(Params, Validation) {
  LearnerParams p;
  EXPECT_NO_THROW(p.validate());
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.delay = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.delta_a = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_EQ(parse_exploration(to_string(ExplorationPolicy::SingleRandomAction)), ExplorationPolicy::SingleRandomAction);
  EXPECT_THROW((void)parse_exploration("greedy"), std::invalid_argument);
}

TEST(KeyCodec, RoundTripAndLayout) {
  const Signature sig{3, 4, {0.0, 1.0}, std::nullopt};
  const KeyCodec codec(sig, false);
  EXPECT_EQ(codec.alphabet_size(), 24u);
  EXPECT_EQ(codec.terminal_key(), 24u);
  std::vector<bool> seen(24, false);
  for (std::uint32_t a = 0; a < 3; ++a) {
    for (std::uint32_t o = 0; o < 4; ++o) {
      for (std::uint32_t r = 0; r < 2; ++r) {
        const StepSymbol s{ActionId{a}, ObservationId{o}, RewardId{r}};
        const auto k = codec.encode(s);
        EXPECT_EQ(k, (a * 4 + o) * 2 + r);
        EXPECT_EQ(codec.decode(k), s);
        EXPECT_FALSE(seen[k]);
        seen[k] = true;
      }
    }
  }
  const KeyCodec obs_only(sig, true);
  EXPECT_EQ(obs_only.alphabet_size(), 4u);
  EXPECT_EQ(obs_only.encode(StepSymbol{ActionId{2}, ObservationId{3}, RewardId{1}}), 3u);
  EXPECT_EQ(transition_key(StepSymbol{ActionId{1}, ObservationId{0}, RewardId{1}}, sig, false), 9u);
}

TEST(FutureStats, PrefixesAndTerminalAugmentation) {
  FutureStats f;
  const std::vector<TransitionKey> a{1, 2};
  const std::vector<TransitionKey> b{1};
  f.add(a, false, 9);
  f.add(b, true, 9);
  EXPECT_EQ(f.samples(), 2u);
  EXPECT_EQ(f.count({1}), 2u);
  EXPECT_EQ(f.count({1, 2}), 1u);
  EXPECT_EQ(f.count({1, 9}), 1u);
  EXPECT_EQ(f.count({2}), 0u);
  EXPECT_DOUBLE_EQ(f.frequency({1, 2}), 0.5);
  FutureStats empty_future;
  empty_future.add({}, true, 9);
  EXPECT_EQ(empty_future.count({9}), 1u);
}

TEST(FutureStats, LinfDistanceExamples) {
  FutureStats half, one, other;
  const std::vector<TransitionKey> k0{0}, k1{1};
  half.add(k0, false, 5);
  half.add(k1, false, 5);
  one.add(k0, false, 5);
  other.add(k1, false, 5);
  EXPECT_DOUBLE_EQ(prefix_linf_distance(half, one), 0.5);
  EXPECT_DOUBLE_EQ(prefix_linf_distance(one, other), 1.0);
  EXPECT_DOUBLE_EQ(prefix_linf_distance(one, one), 0.0);
  EXPECT_DOUBLE_EQ(prefix_linf_distance(half, one), prefix_linf_distance(one, half));
  EXPECT_THROW((void)prefix_linf_distance(FutureStats{}, one), std::invalid_argument);
}

// One action, three observations, one reward: keys are observation indices.
class ScriptedGraph : public ::testing::Test {
 protected:
  static Signature signature() { return Signature{1, 3, {0.0}, std::nullopt}; }
  static LearnerParams params(std::uint32_t n_max = 5) {
    LearnerParams p;
    p.mu = 1.0;
    p.delay = 1;
    p.n_max = n_max;
    return p;
  }
  static History episode(std::initializer_list<std::uint32_t> observations) {
    History h;
    for (auto o : observations) h.push_back(StepSymbol{ActionId{0}, ObservationId{o}, RewardId{0}});
    return h;
  }
  static void feed(HypothesisGraph& g) {
    g.consume(episode({0, 0}));
    g.consume(episode({0, 0}));  // root promoted, futures {[0]}
    g.consume(episode({1}));
    g.consume(episode({1}));  // candidate under key 1 ends at once: promoted
    g.consume(episode({2, 0}));
    g.consume(episode({2}));  // half [0], half ended: 0.5 from both, merged into the lower id
  }
};

TEST_F(ScriptedGraph, PromoteThenMergeWithLowestIdTieBreak) {
  HypothesisGraph g(signature(), params());
  g.set_threshold(2);
  EXPECT_EQ(g.lookup({}), (AbstractState{0, NodeKind::Candidate}));
  EXPECT_EQ(g.num_safe(), 0u);
  feed(g);
  ASSERT_EQ(g.num_safe(), 2u);
  EXPECT_EQ(g.version(), 3u);
  ASSERT_EQ(g.events().size(), 3u);
  EXPECT_EQ(g.events()[0].kind, EventKind::Promote);
  EXPECT_EQ(g.events()[1].kind, EventKind::Promote);
  EXPECT_EQ(g.events()[1].safe, 1u);
  EXPECT_EQ(g.events()[2].kind, EventKind::Merge);
  EXPECT_EQ(g.events()[2].safe, 0u);
  EXPECT_EQ(g.events()[2].episode, 6u);
  const auto h2 = episode({2});
  EXPECT_EQ(g.lookup(h2), (AbstractState{0, NodeKind::Safe}));
  EXPECT_EQ(g.lookup(episode({1})), (AbstractState{1, NodeKind::Safe}));
  EXPECT_FALSE(g.lookup(episode({0})).has_value() && g.lookup(episode({0}))->safe());
  EXPECT_EQ(g.event_bound(), 5u * (3u + 1u) + 1u);
}

TEST_F(ScriptedGraph, DumpFormat) {
  HypothesisGraph g(signature(), params());
  g.set_threshold(2);
  feed(g);
  g.consume(episode({0, 1}));
  EXPECT_EQ(g.dump(),
            "# version 3 safe 2 candidates 1 n_min 2 episodes 7\n"
            "safe 0 N=2 0->C3 1->S1 2->S0\n"
            "safe 1 N=2\n"
            "candidate 3 parent=0 key=0 N=1\n");
}

TEST_F(ScriptedGraph, FrozenStatisticsNeverChange) {
  HypothesisGraph g(signature(), params());
  g.set_threshold(2);
  feed(g);
  const auto frozen0 = g.safe_nodes()[0].frozen;
  const auto frozen1 = g.safe_nodes()[1].frozen;
  for (int i = 0; i < 10; ++i) {
    g.consume(episode({0, 1, 2}));
    g.consume(episode({2, 2}));
  }
  EXPECT_EQ(g.safe_nodes()[0].frozen, frozen0);
  EXPECT_EQ(g.safe_nodes()[1].frozen, frozen1);
}

TEST_F(ScriptedGraph, WaitsBelowThreshold) {
  HypothesisGraph g(signature(), params());
  g.set_threshold(3);
  g.consume(episode({0}));
  g.consume(episode({0}));
  EXPECT_EQ(g.num_safe(), 0u);
  EXPECT_EQ(g.decide(0), Decision{});
  g.consume(episode({0}));
  EXPECT_EQ(g.num_safe(), 1u);
}

TEST_F(ScriptedGraph, StateBudgetExhausted) {
  HypothesisGraph g(signature(), params(1));
  g.set_threshold(2);
  g.consume(episode({0, 0}));
  g.consume(episode({0, 0}));
  g.consume(episode({1}));
  EXPECT_THROW(g.consume(episode({1})), StateBudgetExhaustedError);
  EXPECT_EQ(g.num_safe(), 1u);
  EXPECT_EQ(g.version(), 1u);
}

TEST_F(ScriptedGraph, Isomorphism) {
  HypothesisGraph g(signature(), params());
  g.set_threshold(2);
  EXPECT_FALSE(transition_isomorphic(g, 1, {}));
  feed(g);
  EXPECT_TRUE(transition_isomorphic(g, 2, {{{0, 1}, 1}, {{0, 2}, 0}}));
  // Same state count, different edges.
  EXPECT_FALSE(transition_isomorphic(g, 2, {{{0, 1}, 0}, {{0, 2}, 1}}));
  EXPECT_FALSE(transition_isomorphic(g, 2, {{{0, 1}, 1}}));
  EXPECT_FALSE(transition_isomorphic(g, 3, {{{0, 1}, 1}, {{0, 2}, 0}, {{1, 0}, 2}}));
  EXPECT_FALSE(transition_isomorphic(g, 2, {{{0, 1}, 1}, {{0, 2}, 0}, {{1, 0}, 1}}));
}

TEST_F(ScriptedGraph, Deterministic) {
  HypothesisGraph a(signature(), params()), b(signature(), params());
  a.set_threshold(2);
  b.set_threshold(2);
  feed(a);
  feed(b);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.events(), b.events());
}

TEST(Learner, RecoversTheRotatingBandit) {
  const auto c = envs::EnvConfig::defaults(envs::DomainKind::RotatingMab, 2);
  LearnerParams p;
  p.mu = 0.35;
  p.delta_a = 0.1;
  const auto result = testing::learn_uniform(c, p, 0, 100'000, 1000);
  EXPECT_EQ(result.reference_states, 2u);
  EXPECT_TRUE(result.first_isomorphic.has_value());
  EXPECT_TRUE(result.isomorphic_at_end) << result.graph->dump();
}

}  // namespace
}  // namespace nmrl::learner
