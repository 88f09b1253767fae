#include "nmrl/induced_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "nmrl/errors.hpp"

namespace nmrl {

double MdpRow::total() const {
  double sum = termination;
  for (const auto& o : outcomes) sum += o.probability;
  return sum;
}

double MdpRow::probability(std::uint32_t next_state, RewardId r) const {
  for (const auto& o : outcomes) {
    if (o.next_state == next_state && o.reward == r) return o.probability;
  }
  return 0.0;
}

namespace {

double mdp_row_distance(const MdpRow& a, const MdpRow& b) {
  double worst = std::abs(a.termination - b.termination);
  for (const auto& o : a.outcomes) {
    worst = std::max(worst, std::abs(o.probability - b.probability(o.next_state, o.reward)));
  }
  for (const auto& o : b.outcomes) {
    worst = std::max(worst, std::abs(o.probability - a.probability(o.next_state, o.reward)));
  }
  return worst;
}

}  // namespace

InducedMdp::InducedMdp(std::size_t num_states, std::uint32_t num_actions, std::vector<double> rewards)
    : num_states_(num_states),
      num_actions_(num_actions),
      rewards_(std::move(rewards)),
      rows_(num_states * num_actions) {}

const std::optional<MdpRow>& InducedMdp::row(std::size_t state, ActionId a) const {
  if (state >= num_states_ || a.index >= num_actions_) throw std::out_of_range("induced MDP index");
  return rows_[state * num_actions_ + a.index];
}

bool InducedMdp::has_rows(std::size_t state) const {
  for (std::uint32_t a = 0; a < num_actions_; ++a) {
    if (row(state, ActionId{a})) return true;
  }
  return false;
}

void InducedMdp::set_row(std::size_t state, ActionId a, MdpRow row, double tolerance) {
  if (state >= num_states_ || a.index >= num_actions_) throw std::out_of_range("induced MDP index");
  for (const auto& o : row.outcomes) {
    if (o.probability < 0.0 || o.probability > 1.0 + tolerance) {
      throw std::invalid_argument("induced MDP probability outside [0,1]");
    }
    if (o.next_state >= num_states_ || o.reward.index >= rewards_.size()) {
      throw std::invalid_argument("induced MDP outcome out of range");
    }
  }
  if (std::abs(row.total() - 1.0) > tolerance) {
    throw std::invalid_argument("induced MDP row sums to " + std::to_string(row.total()));
  }
  std::sort(row.outcomes.begin(), row.outcomes.end(), [](const MdpOutcome& x, const MdpOutcome& y) {
    return std::tie(x.next_state, x.reward) < std::tie(y.next_state, y.reward);
  });
  rows_[state * num_actions_ + a.index] = std::move(row);
}

std::vector<double> InducedMdp::finite_horizon_values(std::size_t steps) const {
  std::vector<double> value(num_states_, 0.0);
  std::vector<double> next(num_states_, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t s = 0; s < num_states_; ++s) {
      double best = 0.0;
      bool any = false;
      for (std::uint32_t a = 0; a < num_actions_; ++a) {
        const auto& r = rows_[s * num_actions_ + a];
        if (!r) continue;
        double q = 0.0;
        for (const auto& o : r->outcomes) q += o.probability * (rewards_[o.reward.index] + value[o.next_state]);
        best = any ? std::max(best, q) : q;
        any = true;
      }
      next[s] = best;
    }
    value.swap(next);
  }
  return value;
}

std::vector<std::vector<double>> InducedMdp::total_reward_q_values(std::size_t max_iterations,
                                                                   double tolerance) const {
  std::vector<std::vector<double>> q(num_states_, std::vector<double>(num_actions_, 0.0));
  std::vector<double> v(num_states_, 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t s = 0; s < num_states_; ++s) {
      for (std::uint32_t a = 0; a < num_actions_; ++a) {
        const auto& r = rows_[s * num_actions_ + a];
        if (!r) continue;
        double value = 0.0;
        for (const auto& o : r->outcomes) value += o.probability * (rewards_[o.reward.index] + v[o.next_state]);
        change = std::max(change, std::abs(value - q[s][a]));
        q[s][a] = value;
      }
    }
    for (std::size_t s = 0; s < num_states_; ++s) {
      v[s] = has_rows(s) ? *std::max_element(q[s].begin(), q[s].end()) : 0.0;
    }
    if (change < tolerance) return q;
  }
  throw NonConvergenceError("total-reward value iteration did not converge");
}

InducedMdp marginalize(const TabularNmdp& dynamics, const TotalAbstraction& abstraction, double tolerance) {
  const auto& sig = dynamics.signature();
  InducedMdp mdp(abstraction.num_states, sig.num_actions, sig.rewards);
  // Representative history per (state, action) for error messages.
  std::vector<const History*> witness(abstraction.num_states * sig.num_actions, nullptr);

  for (const History& h : dynamics.histories()) {
    if (dynamics.truncated(h)) continue;
    const std::size_t state = abstraction.map(h);
    if (state >= abstraction.num_states) throw std::out_of_range("abstraction returned an out-of-range state");
    History extended = h;
    extended.emplace_back();
    for (std::uint32_t a = 0; a < sig.num_actions; ++a) {
      const DynamicsRow& drow = dynamics.row(h, ActionId{a});
      std::map<std::pair<std::uint32_t, RewardId>, double> mass;
      for (const auto& o : drow.outcomes) {
        extended.back() = StepSymbol{ActionId{a}, o.observation, o.reward};
        const auto next = static_cast<std::uint32_t>(abstraction.map(extended));
        mass[{next, o.reward}] += o.probability;
      }
      MdpRow row;
      row.termination = drow.termination;
      for (const auto& [key, p] : mass) row.outcomes.push_back(MdpOutcome{key.first, key.second, p});

      const auto& existing = mdp.row(state, ActionId{a});
      auto& seen = witness[state * sig.num_actions + a];
      if (existing) {
        const double gap = mdp_row_distance(*existing, row);
        if (gap > tolerance) {
          throw NotMarkovError("histories '" + to_string(*seen) + "' and '" + to_string(h) +
                               "' share abstract state " + std::to_string(state) + " but differ by " +
                               std::to_string(gap) + " under action " + std::to_string(a));
        }
      } else {
        mdp.set_row(state, ActionId{a}, std::move(row), tolerance);
        seen = &h;
      }
    }
  }
  return mdp;
}

TotalAbstraction last_observation_abstraction(const Signature& signature) {
  const std::size_t start = signature.num_observations;
  return TotalAbstraction{signature.num_observations + 1u, [start](HistoryView h) -> std::size_t {
                            return h.empty() ? start : h.back().observation.index;
                          }};
}

}  // namespace nmrl
