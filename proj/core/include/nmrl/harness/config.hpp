#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nmrl/envs/domain.hpp"
#include "nmrl/learner/learner.hpp"
#include "nmrl/orchestrator/run.hpp"
#include "nmrl/rmax/rmax.hpp"

namespace nmrl::harness {

struct Schedule {
  std::uint64_t training_episodes = 5'000'000;
  std::uint64_t eval_every = 15'000;
  std::uint32_t eval_episodes = 50;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  double delta = 0.2;
  double epsilon = 0.1;
  std::string output_dir = "runs";
  bool record_wall_time = false;
  bool operator==(const Schedule&) const = default;
};

/// A complete experiment description. The learner's and agent's failure
/// budgets are derived from schedule.delta when a run is set up.
struct RunConfig {
  envs::EnvConfig env;
  learner::LearnerParams learner;
  rmax::RmaxParams agent;
  orchestrator::AgentMode mode = orchestrator::AgentMode::RmaxAbstraction;
  Schedule schedule;

  /// Reference parameters for (domain, k); domains and k values without a
  /// row of their own get documented fallbacks.
  static RunConfig defaults(envs::DomainKind domain, std::uint32_t k);

  /// Throws std::invalid_argument on any invalid field.
  void validate() const;
  /// Setup of one seed, with δ/2 for the learner and δ/(2·n_max) for the agent.
  [[nodiscard]] orchestrator::RunSetup setup(std::uint64_t seed) const;
  bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON document with sections env / learner / agent / schedule.
/// Missing fields take the defaults of the configured (domain, k); unknown
/// keys are rejected with std::invalid_argument.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Complete JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

enum class Preset { Desk, Paper };
Preset parse_preset(std::string_view name);

/// Desk caps training at 5·10^5 episodes and shrinks the flickering grid to
/// its 4×4 variant; `paper` sets 5·10^6 episodes.
void apply_preset(RunConfig& config, Preset preset);

inline constexpr std::uint64_t kDeskEpisodes = 500'000;
inline constexpr std::uint64_t kPaperEpisodes = 5'000'000;

}  // namespace nmrl::harness
