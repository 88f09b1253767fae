#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "nmrl/tabular.hpp"

namespace nmrl::oracles {

/// π(a | h).
using StochasticPolicy = std::function<double(HistoryView, ActionId)>;

StochasticPolicy uniform_policy(std::uint32_t num_actions);
/// Deterministic policy from a chooser; π(a|h) = [chooser(h) == a].
StochasticPolicy deterministic_policy(std::function<ActionId(HistoryView)> chooser);

/// D_π(e | ε) by the episode recursion. The episode must carry its final
/// action (A⊥ form).
double dynamics_under_policy(const TabularNmdp& dynamics, const StochasticPolicy& policy, const Episode& episode);

/// Every episode a1 o1 r1 ... an ⊥ with positive dynamics under a policy of
/// full support, in breadth-first order.
std::vector<Episode> enumerate_episodes(const TabularNmdp& dynamics);

/// Exhaustive backward recursion of the optimal values.
class ValueOracle {
 public:
  /// Throws BudgetExceededError when the table holds more than `budget`
  /// (history, action) entries.
  explicit ValueOracle(const TabularNmdp& dynamics, std::size_t budget = kDefaultTableBudget);

  [[nodiscard]] double value(HistoryView h) const;
  [[nodiscard]] double q_value(HistoryView h, ActionId a) const;
  /// Greedy action attaining V*, ties toward the lowest index.
  [[nodiscard]] ActionId greedy(HistoryView h) const;
  [[nodiscard]] StochasticPolicy greedy_policy() const;

 private:
  std::map<History, std::vector<double>> q_;
};

/// V_π(h) by the policy-evaluation recursion.
double policy_value(const TabularNmdp& dynamics, const StochasticPolicy& policy, HistoryView h = {});

/// V*(ε) by direct recursion on a generator, without materializing a table.
/// Memory is linear in the horizon; throws BudgetExceededError once more than
/// `budget` (history, action) entries have been expanded.
double optimal_value_by_recursion(const Signature& signature, std::size_t horizon,
                                  const TabularNmdp::Generator& generator,
                                  std::size_t budget = kDefaultTableBudget);

}  // namespace nmrl::oracles
