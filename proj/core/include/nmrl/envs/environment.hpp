#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "nmrl/envs/domain.hpp"
#include "nmrl/rng.hpp"

namespace nmrl::envs {

struct StepOutcome {
  ObservationId observation;
  RewardId reward;
  bool done = false;
  /// The episode ended by an absorbing event (goal, end of corridor) rather
  /// than by the horizon cut.
  bool terminal = false;
};

/// Seedable episodic simulator over a DomainModel.
class Environment {
 public:
  explicit Environment(const EnvConfig& config);
  explicit Environment(std::shared_ptr<const DomainModel> model);

  /// Starts an episode whose random draws come from `rng`.
  void reset(Rng rng);
  /// Throws SteppedAfterDoneError after the episode is over (or before reset).
  StepOutcome step(ActionId action);
  [[nodiscard]] std::int64_t ground_truth() const { return model_->label(state_); }

  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] std::uint32_t steps_taken() const { return t_; }
  [[nodiscard]] const Latent& latent() const { return state_; }
  [[nodiscard]] const DomainModel& model() const { return *model_; }
  [[nodiscard]] const Signature& signature() const { return model_->signature(); }

 private:
  std::shared_ptr<const DomainModel> model_;
  Latent state_;
  Rng rng_;
  std::uint32_t t_ = 0;
  bool done_ = true;
  std::vector<Transition> scratch_;
};

}  // namespace nmrl::envs
