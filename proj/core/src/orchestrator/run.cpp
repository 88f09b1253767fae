#include "nmrl/orchestrator/run.hpp"

#include <stdexcept>
#include <string>

namespace nmrl::orchestrator {

namespace {

constexpr std::uint64_t kEvalStreamStride = 1ULL << 32;

rmax::NextState to_next(const std::optional<AbstractState>& next, bool terminal) {
  if (terminal) return rmax::NextState::terminated();
  if (next && next->safe()) return rmax::NextState::safe(next->id);
  return rmax::NextState::frontier();
}

}  // namespace

std::string_view to_string(AgentMode mode) {
  switch (mode) {
    case AgentMode::RmaxAbstraction:
      return "rmax_abstraction";
    case AgentMode::RandomSampling:
      return "random_sampling";
    case AgentMode::PlainRmax:
      return "plain_rmax";
  }
  return "unknown";
}

AgentMode parse_mode(std::string_view name) {
  if (name == "rmax_abstraction") return AgentMode::RmaxAbstraction;
  if (name == "random_sampling") return AgentMode::RandomSampling;
  if (name == "plain_rmax") return AgentMode::PlainRmax;
  throw std::invalid_argument("unknown agent mode: " + std::string(name));
}

ConfidenceSplit split_confidence(double delta, std::uint32_t n_max) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  return ConfidenceSplit{delta / 2.0, delta / (2.0 * n_max)};
}

std::vector<std::string> stage_accounting(const StageLog& log, std::uint64_t bound) {
  std::vector<std::string> out;
  if (log.stages.size() > bound) {
    out.push_back("stage count " + std::to_string(log.stages.size()) + " exceeds bound " + std::to_string(bound));
  }
  for (std::size_t i = 1; i < log.stages.size(); ++i) {
    const auto& prev = log.stages[i - 1];
    const auto& cur = log.stages[i];
    if (cur.version <= prev.version) out.push_back("stage versions not increasing at stage " + std::to_string(i));
    if (cur.first_episode < prev.first_episode) out.push_back("stage episodes decreasing at stage " + std::to_string(i));
    if (cur.resets != 1) {
      out.push_back("version " + std::to_string(cur.version) + " has " + std::to_string(cur.resets) + " resets");
    }
  }
  return out;
}

Run::Run(RunSetup setup)
    : setup_(std::move(setup)),
      env_(setup_.env),
      agent_(env_.signature().num_actions, env_.signature().rewards, setup_.agent) {
  if (setup_.mode == AgentMode::PlainRmax) {
    agent_.reset(env_.signature().num_observations + 1ULL, 0);
  } else {
    graph_ = std::make_unique<learner::HypothesisGraph>(env_.signature(), setup_.learner);
    log_.stages.push_back(StageRecord{0, 0, 0, graph_->num_candidates(), 0});
  }
}

std::size_t Run::safe_states() const { return graph_ ? graph_->num_safe() : agent_.num_states(); }

TrainingEpisode Run::train_episode() {
  const std::uint64_t index = episodes_++;
  env_.reset(make_stream(setup_.seed, StreamPurpose::TrainEnvironment, index));
  Rng policy = make_stream(setup_.seed, StreamPurpose::TrainPolicy, index);
  const Signature& sig = env_.signature();
  const std::uint32_t num_actions = sig.num_actions;
  TrainingEpisode result;
  scratch_.clear();

  if (setup_.mode == AgentMode::PlainRmax) {
    std::uint32_t state = sig.num_observations;  // start state
    while (!env_.done()) {
      const ActionId a = agent_.choose(AbstractState{state, NodeKind::Safe});
      const auto out = env_.step(a);
      ++result.agent_steps;
      result.total_reward += sig.reward_value(out.reward);
      agent_.observe(AbstractState{state, NodeKind::Safe}, a, out.reward,
                     out.terminal ? rmax::NextState::terminated() : rmax::NextState::safe(out.observation.index));
      ++result.observations;
      scratch_.push_back(StepSymbol{a, out.observation, out.reward});
      state = out.observation.index;
    }
    result.episode.steps = scratch_;
    return result;
  }

  std::optional<AbstractState> state = graph_->lookup({});
  bool in_safe = state && state->safe();
  std::optional<ActionId> repeated;
  const bool uniform_everywhere = setup_.mode == AgentMode::RandomSampling;
  while (!env_.done()) {
    ActionId a;
    if (in_safe && !uniform_everywhere) {
      a = agent_.choose(*state);
      ++result.agent_steps;
    } else if (in_safe || uniform_everywhere ||
               setup_.learner.exploration == learner::ExplorationPolicy::Uniform) {
      a = ActionId{static_cast<std::uint32_t>(policy.below(num_actions))};
      ++result.exploration_steps;
    } else {
      if (!repeated) repeated = ActionId{static_cast<std::uint32_t>(policy.below(num_actions))};
      a = *repeated;
      ++result.exploration_steps;
    }
    const auto out = env_.step(a);
    const StepSymbol symbol{a, out.observation, out.reward};
    result.total_reward += sig.reward_value(out.reward);
    if (in_safe) {
      const auto next = graph_->next(*state, scratch_, symbol);
      agent_.observe(*state, a, out.reward, to_next(next, out.terminal));
      ++result.observations;
      state = next;
      in_safe = next && next->safe();
    }
    scratch_.push_back(symbol);
  }

  graph_->consume(scratch_);
  monitor_graph();
  if (agent_.update(*graph_)) {
    result.reset = true;
    log_.stages.push_back(
        StageRecord{graph_->version(), episodes_, graph_->num_safe(), graph_->num_candidates(), 1});
  }
  result.episode.steps = scratch_;
  return result;
}

EvalResult Run::evaluate(std::uint64_t point, std::uint32_t episodes) {
  EvalResult result;
  const Signature& sig = env_.signature();
  double ratio_sum = 0.0;
  for (std::uint32_t j = 0; j < episodes; ++j) {
    const std::uint64_t stream = point * kEvalStreamStride + j;
    env_.reset(make_stream(setup_.seed, StreamPurpose::EvalEnvironment, stream));
    Rng policy = make_stream(setup_.seed, StreamPurpose::EvalPolicy, stream);
    double reward = 0.0;
    std::uint64_t steps = 0;
    if (setup_.mode == AgentMode::PlainRmax) {
      std::uint32_t state = sig.num_observations;
      while (!env_.done()) {
        const auto out = env_.step(agent_.choose(AbstractState{state, NodeKind::Safe}));
        reward += sig.reward_value(out.reward);
        ++steps;
        ++result.safe_steps;
        state = out.observation.index;
      }
    } else {
      std::optional<AbstractState> state = graph_->lookup({});
      scratch_.clear();
      while (!env_.done()) {
        const bool safe = state && state->safe();
        const ActionId a = safe ? agent_.choose(*state)
                                : ActionId{static_cast<std::uint32_t>(policy.below(sig.num_actions))};
        if (safe) {
          ++result.safe_steps;
        } else {
          ++result.non_safe_steps;
        }
        const auto out = env_.step(a);
        const StepSymbol symbol{a, out.observation, out.reward};
        reward += sig.reward_value(out.reward);
        ++steps;
        state = state ? graph_->next(*state, scratch_, symbol) : std::nullopt;
        scratch_.push_back(symbol);
      }
    }
    result.total_reward += reward;
    result.steps += steps;
    if (steps > 0) ratio_sum += reward / static_cast<double>(steps);
    ++result.episodes;
  }
  if (episodes > 0) result.avg_reward_per_step = ratio_sum / episodes;
  return result;
}

void Run::monitor_graph() {
  const auto& g = *graph_;
  const auto& safe = g.safe_nodes();
  if (g.version() == seen_version_) {
    if (g.events().size() != seen_events_) violations_.push_back("events logged without a version change");
    return;
  }
  const std::string at = " (episode " + std::to_string(episodes_) + ")";
  if (g.version() < seen_version_) violations_.push_back("version decreased" + at);
  if (g.events().size() - seen_events_ != g.version() - seen_version_) {
    violations_.push_back("version change does not match the event count" + at);
  }
  if (safe.size() < frozen_.size()) violations_.push_back("safe set shrank" + at);
  for (std::size_t i = 0; i < frozen_.size() && i < safe.size(); ++i) {
    if (!(safe[i].frozen == frozen_[i])) violations_.push_back("frozen statistics of safe node " + std::to_string(i) + " changed" + at);
  }
  for (const auto& [edge, target] : safe_edges_) {
    const auto& e = safe.at(edge.first).out.at(edge.second);
    if (!e || !e->safe() || e->id != target) {
      violations_.push_back("safe edge " + std::to_string(edge.first) + "/" + std::to_string(edge.second) +
                            " was removed or redirected" + at);
    }
  }
  if (g.events().size() > g.event_bound()) violations_.push_back("event count exceeds its bound" + at);

  for (std::size_t i = frozen_.size(); i < safe.size(); ++i) frozen_.push_back(safe[i].frozen);
  for (const auto& node : safe) {
    for (std::size_t k = 0; k < node.out.size(); ++k) {
      const auto& e = node.out[k];
      if (e && e->safe()) safe_edges_[{node.id, static_cast<learner::TransitionKey>(k)}] = e->id;
    }
  }
  seen_version_ = g.version();
  seen_events_ = g.events().size();
}

}  // namespace nmrl::orchestrator
