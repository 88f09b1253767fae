#include "nmrl/rmax/rmax.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nmrl/errors.hpp"

namespace nmrl::rmax {

void RmaxParams::validate() const {
  if (m0 < 1) throw std::invalid_argument("rmax: m0 must be at least 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("rmax: gamma must lie in (0, 1)");
  if (!(v_max > 0.0)) throw std::invalid_argument("rmax: v_max must be positive");
  if (vi_tolerance < 0.0) throw std::invalid_argument("rmax: vi_tolerance must be non-negative");
  if (!(delta_m > 0.0 && delta_m < 1.0)) throw std::invalid_argument("rmax: delta_m must lie in (0, 1)");
  if (max_sweeps < 1) throw std::invalid_argument("rmax: max_sweeps must be at least 1");
}

RmaxModel::RmaxModel(std::uint32_t num_actions, std::vector<double> rewards, RmaxParams params)
    : num_actions_(num_actions), rewards_(std::move(rewards)), params_(params) {
  params_.validate();
  if (num_actions_ == 0) throw std::invalid_argument("rmax: no actions");
}

void RmaxModel::require_state(AbstractState s) const {
  if (!s.safe() || s.id >= num_states_) {
    throw UnknownStateError("state " + std::to_string(s.id) + (s.safe() ? " (safe)" : " (candidate)") +
                            " is not a safe state of abstraction version " + std::to_string(version_));
  }
}

void RmaxModel::observe(AbstractState s, ActionId a, RewardId r, NextState next) {
  require_state(s);
  if (a.index >= num_actions_) throw std::out_of_range("rmax: action out of range");
  if (next.kind == NextState::Kind::Safe && next.id >= num_states_) next = NextState::frontier();
  PairStats& p = pairs_[s.id * num_actions_ + a.index];
  ++p.count;
  const auto it = std::find_if(p.outcomes.begin(), p.outcomes.end(),
                               [&](const OutcomeCount& o) { return o.next == next && o.reward == r; });
  if (it == p.outcomes.end()) {
    p.outcomes.push_back(OutcomeCount{next, r, 1});
  } else {
    ++it->count;
  }
  if (!p.known && p.count >= params_.m0) {
    p.known = true;
    dirty_ = true;
  }
}

double RmaxModel::value(std::uint32_t s) const {
  const double* row = q_.data() + static_cast<std::size_t>(s) * num_actions_;
  return *std::max_element(row, row + num_actions_);
}

ActionId RmaxModel::choose(AbstractState s) {
  require_state(s);
  if (dirty_) plan();
  const double* row = q_.data() + static_cast<std::size_t>(s.id) * num_actions_;
  std::uint32_t best = 0;
  for (std::uint32_t a = 1; a < num_actions_; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return ActionId{best};
}

void RmaxModel::plan() {
  struct Compiled {
    double reward_part = 0.0;  // Σ p·r plus γ·v_max per frontier outcome
    std::vector<std::pair<std::uint32_t, double>> successors;  // (safe state, γ·p)
  };
  const double gamma = params_.gamma;
  const double v_max = params_.v_max;
  std::vector<Compiled> compiled(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const PairStats& p = pairs_[i];
    if (!p.known) continue;
    const double n = static_cast<double>(p.count);
    for (const auto& o : p.outcomes) {
      const double prob = static_cast<double>(o.count) / n;
      compiled[i].reward_part += prob * rewards_.at(o.reward.index);
      if (o.next.kind == NextState::Kind::Frontier) compiled[i].reward_part += prob * gamma * v_max;
      if (o.next.kind == NextState::Kind::Safe) compiled[i].successors.emplace_back(o.next.id, gamma * prob);
    }
  }

  std::vector<double> q(pairs_.size(), v_max);
  std::vector<double> v(num_states_, v_max);
  double residual = 0.0;
  std::uint64_t sweeps = 0;
  while (true) {
    ++sweeps;
    residual = 0.0;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      if (!pairs_[i].known) continue;
      double value = compiled[i].reward_part;
      for (const auto& [t, w] : compiled[i].successors) value += w * v[t];
      residual = std::max(residual, std::abs(value - q[i]));
      q[i] = value;
    }
    for (std::size_t s = 0; s < num_states_; ++s) {
      v[s] = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(s * num_actions_),
                               q.begin() + static_cast<std::ptrdiff_t>((s + 1) * num_actions_));
    }
    if (residual < params_.tolerance()) break;
    if (sweeps >= params_.max_sweeps) {
      throw NonConvergenceError("value iteration did not converge within " + std::to_string(sweeps) +
                                " sweeps (residual " + std::to_string(residual) + ")");
    }
  }
  q_ = std::move(q);
  dirty_ = false;
  plan_stats_.sweeps = sweeps;
  plan_stats_.residual = residual;
  ++plan_stats_.plans;
}

bool RmaxModel::update(const PartialAbstraction& abstraction) {
  if (abstraction.version() == version_ && abstraction.num_safe() == num_states_) return false;
  reset(abstraction.num_safe(), abstraction.version());
  ++resets_;
  return true;
}

void RmaxModel::reset(std::size_t num_safe, std::uint64_t version) {
  num_states_ = num_safe;
  version_ = version;
  pairs_.assign(num_safe * num_actions_, PairStats{});
  q_.assign(num_safe * num_actions_, params_.v_max);
  dirty_ = false;
}

std::size_t RmaxModel::known_pairs() const {
  return static_cast<std::size_t>(std::count_if(pairs_.begin(), pairs_.end(), [](const PairStats& p) { return p.known; }));
}

bool RmaxModel::same_model(const RmaxModel& other) const {
  return num_actions_ == other.num_actions_ && rewards_ == other.rewards_ && params_ == other.params_ &&
         num_states_ == other.num_states_ && version_ == other.version_ && pairs_ == other.pairs_ &&
         q_ == other.q_ && dirty_ == other.dirty_;
}

}  // namespace nmrl::rmax
