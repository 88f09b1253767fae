#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "nmrl/envs/domain.hpp"
#include "nmrl/learner/learner.hpp"
#include "nmrl/tabular.hpp"

namespace nmrl::testing {

/// Two actions, observations {0, 1}, rewards {0, 1}. Observation 1 comes
/// with probability 0.8 when the number of 1s seen so far is odd and 0.2
/// otherwise; action 0 is paid 1 for seeing a 1, action 1 is paid 1 for
/// seeing a 0. Never terminates on its own. Markov in the parity, not in the
/// last observation.
Signature parity_signature();
TabularNmdp::Generator parity_generator();
std::size_t parity_of(HistoryView h);

/// Optimal expected reward per step over `steps` steps, by backward induction
/// directly on the latent states of the domain model.
double latent_optimum_per_step(const envs::EnvConfig& config, std::size_t steps);

struct UniformLearning {
  std::unique_ptr<learner::HypothesisGraph> graph;
  std::optional<std::uint64_t> first_isomorphic;  // episode count at the first successful check
  bool isomorphic_at_end = false;
  std::size_t reference_states = 0;
};

/// Feeds `episodes` uniform-policy episodes of `config` to a fresh learner,
/// comparing it with the ground-truth automaton every `check_every` episodes.
UniformLearning learn_uniform(const envs::EnvConfig& config, const learner::LearnerParams& params,
                              std::uint64_t seed, std::uint64_t episodes, std::uint64_t check_every);

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace nmrl::testing
