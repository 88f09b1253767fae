#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmrl/envs/environment.hpp"
#include "nmrl/learner/learner.hpp"
#include "nmrl/rmax/rmax.hpp"

namespace nmrl::orchestrator {

enum class AgentMode { RmaxAbstraction, RandomSampling, PlainRmax };

std::string_view to_string(AgentMode mode);
AgentMode parse_mode(std::string_view name);

struct ConfidenceSplit {
  double learner = 0.0;  // δ/2
  double agent = 0.0;    // δ/(2·n_max), per abstraction version
};
ConfidenceSplit split_confidence(double delta, std::uint32_t n_max);

struct RunSetup {
  envs::EnvConfig env;
  learner::LearnerParams learner;
  rmax::RmaxParams agent;
  AgentMode mode = AgentMode::RmaxAbstraction;
  std::uint64_t seed = 0;
};

struct TrainingEpisode {
  Episode episode;
  std::uint32_t agent_steps = 0;        // actions chosen while in a safe state
  std::uint32_t exploration_steps = 0;  // actions from the exploration policy
  std::uint32_t observations = 0;       // agent observe calls
  double total_reward = 0.0;
  bool reset = false;                   // the agent was reset after this episode
};

struct EvalResult {
  double avg_reward_per_step = 0.0;  // mean over episodes of reward / steps
  double total_reward = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t safe_steps = 0;
  std::uint64_t non_safe_steps = 0;
  std::uint32_t episodes = 0;
};

struct StageRecord {
  std::uint64_t version = 0;
  std::uint64_t first_episode = 0;
  std::size_t safe_states = 0;
  std::size_t candidates = 0;
  std::uint64_t resets = 0;
  bool operator==(const StageRecord&) const = default;
};

struct StageLog {
  std::vector<StageRecord> stages;
  bool operator==(const StageLog&) const = default;
};

/// Checks a finished stage log: at most `bound` versions, versions
/// strictly increasing, episodes nondecreasing, and exactly one agent reset
/// for every version after the first. Violations are returned as text.
std::vector<std::string> stage_accounting(const StageLog& log, std::uint64_t bound);

/// One training run: environment, learner and agent for a fixed seed.
class Run {
 public:
  explicit Run(RunSetup setup);

  /// Plays training episode number `episodes_trained()`, then feeds the
  /// learner and updates the agent.
  TrainingEpisode train_episode();

  /// Greedy on safe states, uniform elsewhere; no learner updates and no
  /// agent observations. Evaluation point `point` has its own random streams.
  EvalResult evaluate(std::uint64_t point, std::uint32_t episodes);

  [[nodiscard]] std::uint64_t episodes_trained() const { return episodes_; }
  [[nodiscard]] const RunSetup& setup() const { return setup_; }
  [[nodiscard]] const Signature& signature() const { return env_.signature(); }
  [[nodiscard]] const learner::HypothesisGraph* graph() const { return graph_.get(); }
  [[nodiscard]] const rmax::RmaxModel& agent() const { return agent_; }
  [[nodiscard]] const StageLog& stage_log() const { return log_; }
  /// Incrementality, frozen statistics, event bound and reset accounting,
  /// checked after every episode.
  [[nodiscard]] const std::vector<std::string>& violations() const { return violations_; }
  [[nodiscard]] std::uint64_t version() const { return graph_ ? graph_->version() : 0; }
  [[nodiscard]] std::size_t safe_states() const;
  [[nodiscard]] std::size_t candidates() const { return graph_ ? graph_->num_candidates() : 0; }

 private:
  void monitor_graph();

  RunSetup setup_;
  envs::Environment env_;
  std::unique_ptr<learner::HypothesisGraph> graph_;
  rmax::RmaxModel agent_;
  std::uint64_t episodes_ = 0;
  StageLog log_;
  std::vector<std::string> violations_;
  History scratch_;

  // Monitor state.
  std::uint64_t seen_version_ = 0;
  std::size_t seen_events_ = 0;
  std::vector<learner::FutureStats> frozen_;
  std::map<std::pair<std::uint32_t, learner::TransitionKey>, std::uint32_t> safe_edges_;
};

}  // namespace nmrl::orchestrator
