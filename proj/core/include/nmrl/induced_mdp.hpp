#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nmrl/abstraction.hpp"
#include "nmrl/tabular.hpp"

namespace nmrl {

struct MdpOutcome {
  std::uint32_t next_state = 0;
  RewardId reward;
  double probability = 0.0;
  bool operator==(const MdpOutcome&) const = default;
};

struct MdpRow {
  std::vector<MdpOutcome> outcomes;  // sorted by (next_state, reward)
  double termination = 0.0;
  [[nodiscard]] double total() const;
  [[nodiscard]] double probability(std::uint32_t next_state, RewardId r) const;
  bool operator==(const MdpRow&) const = default;
};

/// Finite MDP over abstract states. States without rows (candidates, or
/// states never reached by a non-cut history) cannot be acted from.
class InducedMdp {
 public:
  InducedMdp(std::size_t num_states, std::uint32_t num_actions, std::vector<double> rewards);

  [[nodiscard]] std::size_t num_states() const { return num_states_; }
  [[nodiscard]] std::uint32_t num_actions() const { return num_actions_; }
  [[nodiscard]] const std::vector<double>& rewards() const { return rewards_; }
  [[nodiscard]] const std::optional<MdpRow>& row(std::size_t state, ActionId a) const;
  [[nodiscard]] bool has_rows(std::size_t state) const;

  /// Throws std::invalid_argument if the row is not a distribution within tolerance.
  void set_row(std::size_t state, ActionId a, MdpRow row, double tolerance = kDerivedRowTolerance);

  /// Optimal expected total reward of `steps` steps from `state`
  /// (finite-horizon backward induction; states without rows are worth 0).
  [[nodiscard]] std::vector<double> finite_horizon_values(std::size_t steps) const;
  /// Undiscounted optimal action values, assuming termination is reached
  /// with probability one (acyclic or properly terminating MDPs).
  [[nodiscard]] std::vector<std::vector<double>> total_reward_q_values(std::size_t max_iterations = 10'000,
                                                                       double tolerance = 1e-13) const;

  bool operator==(const InducedMdp&) const = default;

 private:
  std::size_t num_states_;
  std::uint32_t num_actions_;
  std::vector<double> rewards_;
  std::vector<std::optional<MdpRow>> rows_;
};

/// The MDP induced by a total Markov abstraction: marginalizes every
/// non-cut history's rows through the abstraction. Throws NotMarkovError
/// when two histories mapped to one state give rows further apart than
/// `tolerance`.
InducedMdp marginalize(const TabularNmdp& dynamics, const TotalAbstraction& abstraction,
                       double tolerance = kDerivedRowTolerance);

/// The identity abstraction of an MDP: last observation, with a dedicated
/// start state `num_observations` for the empty history.
TotalAbstraction last_observation_abstraction(const Signature& signature);

}  // namespace nmrl
