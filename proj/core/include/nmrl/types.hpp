#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nmrl {

struct ActionId {
  std::uint32_t index = 0;
  auto operator<=>(const ActionId&) const = default;
};

struct ObservationId {
  std::uint32_t index = 0;
  auto operator<=>(const ObservationId&) const = default;
};

/// Index into the owning process's reward list. Reward equality is index
/// equality; the numeric value lives in Signature::rewards.
struct RewardId {
  std::uint32_t index = 0;
  auto operator<=>(const RewardId&) const = default;
};

/// One (action, observation, reward) letter of a history.
struct StepSymbol {
  ActionId action;
  ObservationId observation;
  RewardId reward;
  auto operator<=>(const StepSymbol&) const = default;
};

using History = std::vector<StepSymbol>;
using HistoryView = std::span<const StepSymbol>;

/// A finished interaction. Every episode ends with the termination marker.
/// `final_action` carries the action paired with termination when the
/// episode is written over the A-bottom alphabet (a1 o1 r1 ... an ⊥); the
/// harness leaves it empty since its domains terminate independently of the
/// action.
struct Episode {
  History steps;
  std::optional<ActionId> final_action;
  bool operator==(const Episode&) const = default;
};

/// Alphabet sizes and the finite reward list of a decision process.
struct Signature {
  std::uint32_t num_actions = 0;
  std::uint32_t num_observations = 0;
  std::vector<double> rewards;
  std::optional<ObservationId> blank_observation;

  [[nodiscard]] std::uint32_t num_rewards() const {
    return static_cast<std::uint32_t>(rewards.size());
  }
  [[nodiscard]] double reward_value(RewardId r) const { return rewards.at(r.index); }
  [[nodiscard]] double max_reward() const;
  /// Index of `value` in the reward list; throws std::invalid_argument if absent.
  [[nodiscard]] RewardId reward_id(double value) const;
  [[nodiscard]] bool valid(const StepSymbol& s) const {
    return s.action.index < num_actions && s.observation.index < num_observations &&
           s.reward.index < num_rewards();
  }
  /// Throws std::invalid_argument on empty alphabets or negative rewards.
  void validate() const;
  bool operator==(const Signature&) const = default;
};

std::string to_string(const StepSymbol& s);
std::string to_string(HistoryView h);

}  // namespace nmrl
