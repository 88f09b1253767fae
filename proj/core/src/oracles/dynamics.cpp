#include "nmrl/oracles/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nmrl/errors.hpp"

namespace nmrl::oracles {

StochasticPolicy uniform_policy(std::uint32_t num_actions) {
  const double p = 1.0 / static_cast<double>(num_actions);
  return [p, num_actions](HistoryView, ActionId a) { return a.index < num_actions ? p : 0.0; };
}

StochasticPolicy deterministic_policy(std::function<ActionId(HistoryView)> chooser) {
  return [chooser = std::move(chooser)](HistoryView h, ActionId a) { return chooser(h) == a ? 1.0 : 0.0; };
}

double dynamics_under_policy(const TabularNmdp& dynamics, const StochasticPolicy& policy, const Episode& episode) {
  if (!episode.final_action) throw std::invalid_argument("episode lacks its final action");
  double probability = 1.0;
  const HistoryView steps(episode.steps);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto prefix = steps.first(i);
    if (!dynamics.contains(prefix)) return 0.0;
    const auto& s = steps[i];
    probability *= policy(prefix, s.action) * dynamics.row(prefix, s.action).probability(s.observation, s.reward);
    if (probability == 0.0) return 0.0;
  }
  if (!dynamics.contains(steps)) return 0.0;
  return probability * policy(steps, *episode.final_action) *
         dynamics.row(steps, *episode.final_action).termination;
}

std::vector<Episode> enumerate_episodes(const TabularNmdp& dynamics) {
  std::vector<Episode> out;
  for (const History& h : dynamics.histories()) {
    for (std::uint32_t a = 0; a < dynamics.signature().num_actions; ++a) {
      if (dynamics.row(h, ActionId{a}).termination > 0.0) out.push_back(Episode{h, ActionId{a}});
    }
  }
  return out;
}

namespace {

double recurse_optimal(const Signature& signature, std::size_t horizon, const TabularNmdp::Generator& generator,
                       History& h, std::size_t budget, std::size_t& expanded) {
  if (h.size() >= horizon) return 0.0;
  double best = 0.0;
  for (std::uint32_t a = 0; a < signature.num_actions; ++a) {
    if (++expanded > budget) {
      throw BudgetExceededError("recursive value oracle exceeds " + std::to_string(budget) + " entries");
    }
    DynamicsRow row = generator(h, ActionId{a});
    row.normalize_layout();
    double q = 0.0;
    for (const auto& o : row.outcomes) {
      h.push_back(StepSymbol{ActionId{a}, o.observation, o.reward});
      q += o.probability * (signature.reward_value(o.reward) +
                            recurse_optimal(signature, horizon, generator, h, budget, expanded));
      h.pop_back();
    }
    best = a == 0 ? q : std::max(best, q);
  }
  return best;
}

}  // namespace

double optimal_value_by_recursion(const Signature& signature, std::size_t horizon,
                                  const TabularNmdp::Generator& generator, std::size_t budget) {
  History h;
  std::size_t expanded = 0;
  return recurse_optimal(signature, horizon, generator, h, budget, expanded);
}

ValueOracle::ValueOracle(const TabularNmdp& dynamics, std::size_t budget) {
  if (dynamics.entries() > budget) {
    throw BudgetExceededError("value oracle table has " + std::to_string(dynamics.entries()) + " entries (budget " +
                              std::to_string(budget) + ")");
  }
  const auto& histories = dynamics.histories();
  const std::uint32_t num_actions = dynamics.signature().num_actions;
  // Breadth-first order: iterating backwards visits every child before its parent.
  std::map<History, double> value;
  for (auto it = histories.rbegin(); it != histories.rend(); ++it) {
    const History& h = *it;
    std::vector<double> q(num_actions, 0.0);
    History extended = h;
    extended.emplace_back();
    for (std::uint32_t a = 0; a < num_actions; ++a) {
      for (const auto& o : dynamics.row(h, ActionId{a}).outcomes) {
        extended.back() = StepSymbol{ActionId{a}, o.observation, o.reward};
        q[a] += o.probability * (dynamics.signature().reward_value(o.reward) + value.at(extended));
      }
    }
    value[h] = *std::max_element(q.begin(), q.end());
    q_.emplace(h, std::move(q));
  }
}

double ValueOracle::q_value(HistoryView h, ActionId a) const {
  const auto it = q_.find(History(h.begin(), h.end()));
  if (it == q_.end()) throw std::out_of_range("history not covered by the value oracle: " + to_string(h));
  return it->second.at(a.index);
}

double ValueOracle::value(HistoryView h) const {
  const auto it = q_.find(History(h.begin(), h.end()));
  if (it == q_.end()) throw std::out_of_range("history not covered by the value oracle: " + to_string(h));
  return *std::max_element(it->second.begin(), it->second.end());
}

ActionId ValueOracle::greedy(HistoryView h) const {
  const auto it = q_.find(History(h.begin(), h.end()));
  if (it == q_.end()) throw std::out_of_range("history not covered by the value oracle: " + to_string(h));
  const auto& q = it->second;
  return ActionId{static_cast<std::uint32_t>(std::max_element(q.begin(), q.end()) - q.begin())};
}

StochasticPolicy ValueOracle::greedy_policy() const {
  return deterministic_policy([this](HistoryView h) { return greedy(h); });
}

double policy_value(const TabularNmdp& dynamics, const StochasticPolicy& policy, HistoryView h) {
  if (!dynamics.contains(h)) throw std::out_of_range("history not in table: " + to_string(h));
  double total = 0.0;
  History extended(h.begin(), h.end());
  extended.emplace_back();
  for (std::uint32_t a = 0; a < dynamics.signature().num_actions; ++a) {
    const double pa = policy(h, ActionId{a});
    if (pa == 0.0) continue;
    for (const auto& o : dynamics.row(h, ActionId{a}).outcomes) {
      extended.back() = StepSymbol{ActionId{a}, o.observation, o.reward};
      total += pa * o.probability *
               (dynamics.signature().reward_value(o.reward) + policy_value(dynamics, policy, extended));
    }
  }
  return total;
}

}  // namespace nmrl::oracles
