#include "nmrl/oracles/pomdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "nmrl/errors.hpp"

namespace nmrl::oracles {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_distribution(const std::vector<double>& row, double extra, double tolerance, const char* what) {
  double total = extra;
  for (double p : row) {
    require(p >= 0.0 && p <= 1.0 + tolerance, what);
    total += p;
  }
  require(std::abs(total - 1.0) <= tolerance, what);
}

}  // namespace

void Pomdp::validate(double tolerance) const {
  signature.validate();
  const std::size_t na = signature.num_actions;
  const std::size_t no = signature.num_observations;
  const std::size_t nr = signature.num_rewards();
  require(num_hidden > 0 && initial < num_hidden, "POMDP hidden state set is empty or initial out of range");
  require(transition.size() == num_hidden && observation.size() == num_hidden && termination.size() == num_hidden &&
              reward.size() == num_hidden,
          "POMDP tables must have one entry per hidden state");
  for (std::size_t x = 0; x < num_hidden; ++x) {
    require(transition[x].size() == na && observation[x].size() == na && termination[x].size() == na &&
                reward[x].size() == na,
            "POMDP tables must have one entry per action");
    for (std::size_t a = 0; a < na; ++a) {
      require(transition[x][a].size() == num_hidden, "transition row has wrong width");
      require_distribution(transition[x][a], 0.0, tolerance, "transition row is not a distribution");
      require(observation[x][a].size() == no, "observation row has wrong width");
      require_distribution(observation[x][a], termination[x][a], tolerance, "observation row is not a distribution");
      require(reward[x][a].size() == no, "reward table has wrong width");
      for (std::size_t o = 0; o < no; ++o) {
        require(reward[x][a][o].size() == nr, "reward row has wrong width");
        require_distribution(reward[x][a][o], 0.0, tolerance, "reward row is not a distribution");
      }
    }
  }
}

double max_norm_distance(const BeliefState& a, const BeliefState& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.probabilities.size(); ++i) {
    worst = std::max(worst, std::abs(a.probabilities[i] - b.probabilities.at(i)));
  }
  return worst;
}

namespace {

std::vector<double> predict(const Pomdp& pomdp, const std::vector<double>& belief, ActionId a) {
  std::vector<double> next(pomdp.num_hidden, 0.0);
  for (std::size_t x = 0; x < pomdp.num_hidden; ++x) {
    if (belief[x] == 0.0) continue;
    for (std::size_t y = 0; y < pomdp.num_hidden; ++y) next[y] += belief[x] * pomdp.transition[x][a.index][y];
  }
  return next;
}

}  // namespace

BeliefState belief_update(const Pomdp& pomdp, HistoryView history) {
  std::vector<double> belief(pomdp.num_hidden, 0.0);
  belief[pomdp.initial] = 1.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& s = history[i];
    auto next = predict(pomdp, belief, s.action);
    for (std::size_t y = 0; y < pomdp.num_hidden; ++y) {
      next[y] *= pomdp.observation[y][s.action.index][s.observation.index] *
                 pomdp.reward[y][s.action.index][s.observation.index][s.reward.index];
    }
    const double mass = std::accumulate(next.begin(), next.end(), 0.0);
    if (mass <= 0.0) {
      throw ZeroProbabilityHistoryError("history has probability zero at step " + std::to_string(i) + ": " +
                                        to_string(history));
    }
    for (double& p : next) p /= mass;
    belief = std::move(next);
  }
  return BeliefState{std::move(belief)};
}

DynamicsRow belief_dynamics(const Pomdp& pomdp, const BeliefState& belief, ActionId a) {
  const auto predicted = predict(pomdp, belief.probabilities, a);
  DynamicsRow row;
  for (std::size_t y = 0; y < pomdp.num_hidden; ++y) {
    if (predicted[y] == 0.0) continue;
    row.termination += predicted[y] * pomdp.termination[y][a.index];
    for (std::uint32_t o = 0; o < pomdp.signature.num_observations; ++o) {
      const double po = predicted[y] * pomdp.observation[y][a.index][o];
      if (po == 0.0) continue;
      for (std::uint32_t r = 0; r < pomdp.signature.num_rewards(); ++r) {
        const double p = po * pomdp.reward[y][a.index][o][r];
        if (p > 0.0) row.outcomes.push_back(Outcome{ObservationId{o}, RewardId{r}, p});
      }
    }
  }
  row.normalize_layout();
  return row;
}

namespace {

// Joint weight of each terminal hidden state with the observed history,
// accumulated over every hidden trajectory x0 x1 ... xn.
void trajectory_weights(const Pomdp& pomdp, HistoryView history, std::size_t step, std::size_t x, double weight,
                        std::vector<double>& out) {
  if (weight == 0.0) return;
  if (step == history.size()) {
    out[x] += weight;
    return;
  }
  const auto& s = history[step];
  for (std::size_t y = 0; y < pomdp.num_hidden; ++y) {
    const double w = weight * pomdp.transition[x][s.action.index][y] *
                     pomdp.observation[y][s.action.index][s.observation.index] *
                     pomdp.reward[y][s.action.index][s.observation.index][s.reward.index];
    trajectory_weights(pomdp, history, step + 1, y, w, out);
  }
}

}  // namespace

TabularNmdp pomdp_as_tabular(const Pomdp& pomdp, std::size_t horizon, std::size_t budget) {
  pomdp.validate();
  auto generator = [&pomdp](HistoryView h, ActionId a) {
    std::vector<double> last(pomdp.num_hidden, 0.0);
    trajectory_weights(pomdp, h, 0, pomdp.initial, 1.0, last);
    const double total = std::accumulate(last.begin(), last.end(), 0.0);
    DynamicsRow row;
    for (std::size_t x = 0; x < pomdp.num_hidden; ++x) {
      for (std::size_t y = 0; y < pomdp.num_hidden; ++y) {
        const double w = last[x] * pomdp.transition[x][a.index][y] / total;
        if (w == 0.0) continue;
        row.termination += w * pomdp.termination[y][a.index];
        for (std::uint32_t o = 0; o < pomdp.signature.num_observations; ++o) {
          for (std::uint32_t r = 0; r < pomdp.signature.num_rewards(); ++r) {
            const double p = w * pomdp.observation[y][a.index][o] * pomdp.reward[y][a.index][o][r];
            if (p > 0.0) row.outcomes.push_back(Outcome{ObservationId{o}, RewardId{r}, p});
          }
        }
      }
    }
    return row;
  };
  return TabularNmdp::enumerate(pomdp.signature, horizon, generator, budget, kDerivedRowTolerance);
}

ReachableBeliefs enumerate_reachable_beliefs(const Pomdp& pomdp, std::size_t horizon, double dedup_tolerance,
                                             std::size_t budget) {
  pomdp.validate();
  ReachableBeliefs result;
  auto intern = [&](const BeliefState& b) -> std::size_t {
    for (std::size_t i = 0; i < result.beliefs.size(); ++i) {
      const double d = max_norm_distance(result.beliefs[i], b);
      if (dedup_tolerance == 0.0 ? d == 0.0 : d <= dedup_tolerance) return i;
    }
    result.beliefs.push_back(b);
    return result.beliefs.size() - 1;
  };

  std::size_t expansions = 0;
  std::deque<std::pair<History, BeliefState>> frontier;
  frontier.emplace_back(History{}, belief_update(pomdp, {}));
  while (!frontier.empty()) {
    auto [h, belief] = std::move(frontier.front());
    frontier.pop_front();
    result.index.emplace(h, intern(belief));
    if (h.size() >= horizon) continue;
    for (std::uint32_t a = 0; a < pomdp.signature.num_actions; ++a) {
      if (++expansions > budget) throw BudgetExceededError("belief enumeration exceeds its budget");
      const DynamicsRow row = belief_dynamics(pomdp, belief, ActionId{a});
      for (const auto& o : row.outcomes) {
        History next = h;
        next.push_back(StepSymbol{ActionId{a}, o.observation, o.reward});
        BeliefState child = belief_update(pomdp, next);
        frontier.emplace_back(std::move(next), std::move(child));
      }
    }
  }
  return result;
}

}  // namespace nmrl::oracles
