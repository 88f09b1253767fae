#include "nmrl/envs/environment.hpp"

#include "nmrl/errors.hpp"

namespace nmrl::envs {

Environment::Environment(const EnvConfig& config) : Environment(std::shared_ptr<const DomainModel>(make_domain(config))) {}

Environment::Environment(std::shared_ptr<const DomainModel> model) : model_(std::move(model)) {
  state_ = model_->initial();
}

void Environment::reset(Rng rng) {
  rng_ = rng;
  state_ = model_->initial();
  t_ = 0;
  done_ = false;
}

StepOutcome Environment::step(ActionId action) {
  if (done_) throw SteppedAfterDoneError("step called on a finished episode; call reset first");
  if (action.index >= model_->signature().num_actions) throw std::out_of_range("action out of range");
  scratch_.clear();
  model_->transitions(state_, action, scratch_);
  const double u = rng_.uniform();
  double acc = 0.0;
  const Transition* chosen = &scratch_.back();
  for (const auto& t : scratch_) {
    acc += t.probability;
    if (u < acc) {
      chosen = &t;
      break;
    }
  }
  state_ = chosen->next;
  ++t_;
  StepOutcome out{chosen->observation, chosen->reward, false, state_.terminated};
  done_ = out.terminal || t_ >= model_->horizon();
  out.done = done_;
  return out;
}

}  // namespace nmrl::envs
