#include <gtest/gtest.h>

#include "nmrl/envs/domain.hpp"
#include "nmrl/harness/config.hpp"
#include "nmrl/orchestrator/run.hpp"

namespace nmrl::orchestrator {
namespace {

RunSetup rotating_setup(AgentMode mode, std::uint64_t seed = 0) {
  auto config = harness::RunConfig::defaults(envs::DomainKind::RotatingMab, 2);
  config.mode = mode;
  return config.setup(seed);
}

std::size_t safe_prefix(const learner::HypothesisGraph& g, HistoryView h) {
  std::size_t n = 0;
  auto state = g.lookup({});
  for (const auto& s : h) {
    if (!state || !state->safe()) break;
    ++n;
    state = g.next(*state, {}, s);
  }
  return n;
}

TEST(Confidence, Split) {
  const auto split = split_confidence(0.2, 10);
  EXPECT_DOUBLE_EQ(split.learner, 0.1);
  EXPECT_DOUBLE_EQ(split.agent, 0.01);
  EXPECT_THROW((void)split_confidence(0.0, 10), std::invalid_argument);
  EXPECT_THROW((void)split_confidence(0.2, 0), std::invalid_argument);
}

TEST(Modes, NamesRoundTrip) {
  for (auto m : {AgentMode::RmaxAbstraction, AgentMode::RandomSampling, AgentMode::PlainRmax}) {
    EXPECT_EQ(parse_mode(to_string(m)), m);
  }
  EXPECT_THROW((void)parse_mode("q_learning"), std::invalid_argument);
}

TEST(Run, AgentObservesExactlyTheSafePrefix) {
  for (auto mode : {AgentMode::RmaxAbstraction, AgentMode::RandomSampling}) {
    orchestrator::Run run(rotating_setup(mode));
    for (int e = 0; e < 8000; ++e) {
      const learner::HypothesisGraph before = *run.graph();
      const auto ep = run.train_episode();
      ASSERT_EQ(ep.observations, safe_prefix(before, ep.episode.steps)) << to_string(mode) << " episode " << e;
      ASSERT_EQ(ep.agent_steps + ep.exploration_steps, ep.episode.steps.size());
      if (mode == AgentMode::RandomSampling) {
        ASSERT_EQ(ep.agent_steps, 0u);
      } else {
        ASSERT_EQ(ep.agent_steps, ep.observations);
      }
    }
    EXPECT_GT(run.safe_states(), 0u);
  }
}

TEST(Run, SameSeedSameTrajectories) {
  orchestrator::Run a(rotating_setup(AgentMode::RmaxAbstraction, 4)), b(rotating_setup(AgentMode::RmaxAbstraction, 4));
  for (int e = 0; e < 3000; ++e) ASSERT_EQ(a.train_episode().episode, b.train_episode().episode);
  EXPECT_EQ(a.graph()->dump(), b.graph()->dump());
}

TEST(Run, EvaluationDoesNotDisturbTraining) {
  orchestrator::Run plain(rotating_setup(AgentMode::RmaxAbstraction, 2)), evaluated(rotating_setup(AgentMode::RmaxAbstraction, 2));
  for (int e = 1; e <= 6000; ++e) {
    const auto x = plain.train_episode();
    const auto y = evaluated.train_episode();
    ASSERT_EQ(x.episode, y.episode);
    if (e % 500 == 0) (void)evaluated.evaluate(static_cast<std::uint64_t>(e / 500), 20);
  }
  EXPECT_EQ(plain.graph()->dump(), evaluated.graph()->dump());
  EXPECT_TRUE(plain.agent().same_model(evaluated.agent()));
}

TEST(Run, EvaluationIsRepeatable) {
  orchestrator::Run run(rotating_setup(AgentMode::RmaxAbstraction, 1));
  for (int e = 0; e < 5000; ++e) run.train_episode();
  const auto first = run.evaluate(3, 30);
  const auto second = run.evaluate(3, 30);
  EXPECT_EQ(first.total_reward, second.total_reward);
  EXPECT_EQ(first.safe_steps, second.safe_steps);
  EXPECT_EQ(first.episodes, 30u);
  // Fixed-length episodes: the mean of ratios is the ratio of sums.
  EXPECT_NEAR(first.avg_reward_per_step, first.total_reward / static_cast<double>(first.steps), 1e-9);
}

TEST(Run, EmptyAbstractionHasNoSafeSteps) {
  orchestrator::Run run(rotating_setup(AgentMode::RmaxAbstraction));
  const auto eval = run.evaluate(0, 10);
  EXPECT_EQ(eval.safe_steps, 0u);
  EXPECT_EQ(eval.non_safe_steps, 100u);
}

TEST(Run, LearnedAbstractionHasNoNonSafeSteps) {
  orchestrator::Run run(rotating_setup(AgentMode::RmaxAbstraction));
  for (int e = 0; e < 60'000; ++e) run.train_episode();
  const auto eval = run.evaluate(1, 50);
  EXPECT_EQ(eval.non_safe_steps, 0u);
  EXPECT_EQ(eval.safe_steps, 500u);
}

TEST(Run, StageLogAndMonitorStayClean) {
  orchestrator::Run run(rotating_setup(AgentMode::RmaxAbstraction, 3));
  std::uint64_t resets = 0;
  for (int e = 0; e < 30'000; ++e) resets += run.train_episode().reset ? 1 : 0;
  EXPECT_TRUE(run.violations().empty());
  const auto& log = run.stage_log();
  EXPECT_EQ(log.stages.size(), resets + 1);
  EXPECT_EQ(log.stages.back().version, run.version());
  EXPECT_EQ(run.agent().resets(), resets);
  EXPECT_TRUE(stage_accounting(log, run.graph()->event_bound()).empty());
}

TEST(Run, PlainRmaxHasNoLearner) {
  orchestrator::Run run(rotating_setup(AgentMode::PlainRmax));
  for (int e = 0; e < 2000; ++e) {
    const auto ep = run.train_episode();
    ASSERT_EQ(ep.observations, ep.episode.steps.size());
  }
  EXPECT_EQ(run.graph(), nullptr);
  EXPECT_EQ(run.agent().resets(), 0u);
  EXPECT_TRUE(run.stage_log().stages.empty());
  EXPECT_EQ(run.version(), 0u);
  EXPECT_EQ(run.safe_states(), 3u);  // two observations and the start state
}

TEST(StageAccounting, DetectsBrokenLogs) {
  StageLog log;
  log.stages = {{0, 0, 0, 1, 0}, {1, 10, 1, 1, 1}, {1, 20, 1, 1, 1}};
  EXPECT_FALSE(stage_accounting(log, 10).empty());
  log.stages = {{0, 0, 0, 1, 0}, {1, 10, 1, 1, 2}};
  EXPECT_FALSE(stage_accounting(log, 10).empty());
  log.stages = {{0, 0, 0, 1, 0}, {1, 10, 1, 1, 1}, {2, 12, 2, 1, 1}};
  EXPECT_TRUE(stage_accounting(log, 10).empty());
  EXPECT_FALSE(stage_accounting(log, 2).empty());
}

}  // namespace
}  // namespace nmrl::orchestrator
