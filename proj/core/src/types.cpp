#include "nmrl/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace nmrl {

double Signature::max_reward() const {
  return rewards.empty() ? 0.0 : *std::max_element(rewards.begin(), rewards.end());
}

RewardId Signature::reward_id(double value) const {
  const auto it = std::find(rewards.begin(), rewards.end(), value);
  if (it == rewards.end()) {
    throw std::invalid_argument("reward " + std::to_string(value) + " is not in the reward set");
  }
  return RewardId{static_cast<std::uint32_t>(it - rewards.begin())};
}

void Signature::validate() const {
  if (num_actions == 0) throw std::invalid_argument("signature has no actions");
  if (num_observations == 0) throw std::invalid_argument("signature has no observations");
  if (rewards.empty()) throw std::invalid_argument("signature has no rewards");
  for (double r : rewards) {
    if (!(r >= 0.0)) throw std::invalid_argument("rewards must be non-negative");
  }
  if (blank_observation && blank_observation->index >= num_observations) {
    throw std::invalid_argument("blank observation out of range");
  }
}

std::string to_string(const StepSymbol& s) {
  return std::to_string(s.action.index) + ":" + std::to_string(s.observation.index) + ":" +
         std::to_string(s.reward.index);
}

std::string to_string(HistoryView h) {
  if (h.empty()) return "ε";
  std::string out;
  for (const auto& s : h) {
    if (!out.empty()) out += ' ';
    out += to_string(s);
  }
  return out;
}

}  // namespace nmrl
