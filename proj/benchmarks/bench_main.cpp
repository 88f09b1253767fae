#include <benchmark/benchmark.h>

#include "nmrl/envs/environment.hpp"
#include "nmrl/harness/config.hpp"
#include "nmrl/learner/learner.hpp"
#include "nmrl/orchestrator/run.hpp"
#include "nmrl/rmax/rmax.hpp"

namespace {

using namespace nmrl;

envs::EnvConfig bench_config(int which) {
  switch (which) {
    case 0:
      return envs::EnvConfig::defaults(envs::DomainKind::RotatingMab, 3);
    case 1:
      return envs::EnvConfig::defaults(envs::DomainKind::RotatingMaze, 2);
    default:
      return envs::EnvConfig::defaults(envs::DomainKind::FlickeringGrid, 1);
  }
}

void BM_EnvironmentStep(benchmark::State& state) {
  envs::Environment env(bench_config(static_cast<int>(state.range(0))));
  Rng policy(1);
  std::uint64_t episode = 0;
  env.reset(make_stream(0, StreamPurpose::TrainEnvironment, episode));
  for (auto _ : state) {
    if (env.done()) env.reset(make_stream(0, StreamPurpose::TrainEnvironment, ++episode));
    const auto out = env.step(ActionId{static_cast<std::uint32_t>(policy.below(env.signature().num_actions))});
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvironmentStep)->Arg(0)->Arg(1)->Arg(2);

// Consumes pre-generated uniform episodes; the graph is rebuilt whenever the
// pool is exhausted so the cost stays that of a young hypothesis.
void BM_LearnerConsume(benchmark::State& state) {
  const auto config = envs::EnvConfig::defaults(envs::DomainKind::RotatingMab, 2);
  envs::Environment env(config);
  std::vector<History> pool(20'000);
  for (std::size_t e = 0; e < pool.size(); ++e) {
    env.reset(make_stream(0, StreamPurpose::TrainEnvironment, e));
    Rng policy = make_stream(0, StreamPurpose::TrainPolicy, e);
    while (!env.done()) {
      const ActionId a{static_cast<std::uint32_t>(policy.below(2))};
      const auto out = env.step(a);
      pool[e].push_back(StepSymbol{a, out.observation, out.reward});
    }
  }
  learner::LearnerParams params;
  params.delta_a = 0.1;
  auto graph = std::make_unique<learner::HypothesisGraph>(env.signature(), params);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == pool.size()) {
      state.PauseTiming();
      graph = std::make_unique<learner::HypothesisGraph>(env.signature(), params);
      i = 0;
      state.ResumeTiming();
    }
    graph->consume(pool[i++]);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LearnerConsume);

// Value iteration over a fully known random model with `range(0)` states.
void BM_RmaxPlan(benchmark::State& state) {
  const auto states = static_cast<std::uint32_t>(state.range(0));
  const std::uint32_t actions = 4;
  rmax::RmaxParams params;
  params.m0 = 4;
  rmax::RmaxModel model(actions, {0.0, 1.0}, params);
  model.reset(states, 0);
  Rng rng(5);
  for (std::uint32_t s = 0; s < states; ++s) {
    for (std::uint32_t a = 0; a < actions; ++a) {
      for (int i = 0; i < 4; ++i) {
        model.observe(AbstractState{s, NodeKind::Safe}, ActionId{a}, RewardId{static_cast<std::uint32_t>(rng.below(2))},
                      rmax::NextState::safe(static_cast<std::uint32_t>(rng.below(states))));
      }
    }
  }
  for (auto _ : state) {
    model.plan();
    benchmark::DoNotOptimize(model.q(0, ActionId{0}));
  }
  state.counters["sweeps"] = static_cast<double>(model.plan_stats().sweeps);
}
BENCHMARK(BM_RmaxPlan)->Arg(10)->Arg(100)->Arg(200);

void BM_TrainingEpisode(benchmark::State& state) {
  auto config = harness::RunConfig::defaults(envs::DomainKind::RotatingMab, 2);
  orchestrator::Run run(config.setup(0));
  for (auto _ : state) benchmark::DoNotOptimize(run.train_episode());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrainingEpisode);

}  // namespace

BENCHMARK_MAIN();
