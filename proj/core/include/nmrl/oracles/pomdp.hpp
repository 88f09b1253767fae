#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "nmrl/tabular.hpp"

namespace nmrl::oracles {

/// Finite POMDP. One step from hidden state x under action a: draw
/// x' ~ T(·|x,a); then either terminate with Z(⊥|x',a) or emit o ~ Z(·|x',a)
/// and r ~ R(·|x',a,o). Observation and reward are both conditioned on the
/// post-transition hidden state.
struct Pomdp {
  Signature signature;
  std::size_t num_hidden = 0;
  std::vector<std::vector<std::vector<double>>> transition;   // [x][a][x']
  std::vector<std::vector<std::vector<double>>> observation;  // [x'][a][o]
  std::vector<std::vector<double>> termination;               // [x'][a]
  std::vector<std::vector<std::vector<std::vector<double>>>> reward;  // [x'][a][o][r]
  std::size_t initial = 0;

  /// Throws std::invalid_argument on shape errors or rows not summing to one.
  void validate(double tolerance = kExactRowTolerance) const;
};

struct BeliefState {
  std::vector<double> probabilities;
  bool operator==(const BeliefState&) const = default;
};

double max_norm_distance(const BeliefState& a, const BeliefState& b);

/// Bayesian filter along `history`: predict with T, condition on Z and R.
/// Throws ZeroProbabilityHistoryError if the history has probability zero.
BeliefState belief_update(const Pomdp& pomdp, HistoryView history);

/// Next-step dynamics expressed through the belief state.
DynamicsRow belief_dynamics(const Pomdp& pomdp, const BeliefState& belief, ActionId a);

/// Exact dynamics of the POMDP as a history-based process, computed by summing
/// over every hidden-state trajectory consistent with the history (no filter).
TabularNmdp pomdp_as_tabular(const Pomdp& pomdp, std::size_t horizon, std::size_t budget = kDefaultTableBudget);

struct ReachableBeliefs {
  std::vector<BeliefState> beliefs;
  std::map<History, std::size_t> index;  // history -> position in `beliefs`
};

/// Breadth-first over positive-probability histories of length ≤ horizon,
/// deduplicating beliefs within `dedup_tolerance` in max-norm (0 = exact).
/// Throws BudgetExceededError past `budget` (history, action) expansions.
ReachableBeliefs enumerate_reachable_beliefs(const Pomdp& pomdp, std::size_t horizon, double dedup_tolerance,
                                             std::size_t budget = kDefaultTableBudget);

}  // namespace nmrl::oracles
