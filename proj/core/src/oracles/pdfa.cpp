#include "nmrl/oracles/pdfa.hpp"

#include <cmath>
#include <stdexcept>

#include "nmrl/errors.hpp"

namespace nmrl::oracles {

Pdfa::Pdfa(std::vector<State> states, std::uint32_t initial) : states_(std::move(states)), initial_(initial) {
  if (initial_ >= states_.size()) throw std::invalid_argument("PDFA initial state out of range");
  for (const auto& s : states_) {
    for (const auto& [symbol, target] : s.transitions) {
      if (target >= states_.size()) throw std::invalid_argument("PDFA transition target out of range");
    }
  }
}

void Pdfa::validate(double tolerance) const {
  const std::size_t n = states_.size();
  std::vector<bool> terminates(n, false);
  for (std::size_t q = 0; q < n; ++q) {
    double total = 0.0;
    for (const auto& [symbol, p] : states_[q].emission) {
      if (p < 0.0 || p > 1.0 + tolerance) throw std::invalid_argument("PDFA probability outside [0,1]");
      total += p;
    }
    for (const auto& [a, p] : states_[q].termination) {
      if (p < 0.0 || p > 1.0 + tolerance) throw std::invalid_argument("PDFA probability outside [0,1]");
      total += p;
      if (p > 0.0) terminates[q] = true;
    }
    if (std::abs(total - 1.0) > tolerance) {
      throw std::invalid_argument("PDFA state " + std::to_string(q) + " λ sums to " + std::to_string(total));
    }
    for (const auto& [symbol, p] : states_[q].emission) {
      if (p > 0.0 && !states_[q].transitions.contains(symbol)) {
        throw std::invalid_argument("PDFA emits a symbol without a transition");
      }
    }
  }
  // Backward fixpoint: a state terminates if some positive edge reaches one that does.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t q = 0; q < n; ++q) {
      if (terminates[q]) continue;
      for (const auto& [symbol, p] : states_[q].emission) {
        if (p > 0.0 && terminates[states_[q].transitions.at(symbol)]) {
          terminates[q] = true;
          changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t q = 0; q < n; ++q) {
    if (!terminates[q]) throw std::invalid_argument("PDFA state " + std::to_string(q) + " never terminates");
  }
}

std::optional<std::uint32_t> Pdfa::run(HistoryView w) const {
  std::uint32_t q = initial_;
  for (const auto& symbol : w) {
    const auto it = states_[q].transitions.find(symbol);
    if (it == states_[q].transitions.end()) return std::nullopt;
    q = it->second;
  }
  return q;
}

double pdfa_episode_probability(const Pdfa& pdfa, const Episode& episode) {
  if (!episode.final_action) throw std::invalid_argument("episode lacks its final action");
  std::uint32_t q = pdfa.initial();
  double probability = 1.0;
  for (const auto& symbol : episode.steps) {
    const auto& state = pdfa.state(q);
    const auto it = state.transitions.find(symbol);
    if (it == state.transitions.end()) {
      throw UndefinedTransitionError("PDFA has no transition on " + to_string(symbol) + " from state " +
                                     std::to_string(q));
    }
    const auto e = state.emission.find(symbol);
    probability *= e == state.emission.end() ? 0.0 : e->second;
    q = it->second;
  }
  const auto& terminal = pdfa.state(q).termination;
  const auto t = terminal.find(*episode.final_action);
  return probability * (t == terminal.end() ? 0.0 : t->second);
}

std::vector<std::optional<History>> default_representatives(const TabularNmdp& dynamics,
                                                            const TotalAbstraction& abstraction) {
  std::vector<std::optional<History>> reps(abstraction.num_states);
  // histories() is ordered by length then lexicographically, so the first hit wins.
  for (const History& h : dynamics.histories()) {
    auto& rep = reps.at(abstraction.map(h));
    if (!rep) rep = h;
  }
  return reps;
}

Pdfa build_abstraction_automaton(const TotalAbstraction& abstraction, const StatePolicy& policy,
                                 const TabularNmdp& dynamics,
                                 std::optional<std::vector<std::optional<History>>> representatives,
                                 double tolerance) {
  const auto& sig = dynamics.signature();
  auto reps = representatives ? std::move(*representatives) : default_representatives(dynamics, abstraction);
  if (reps.size() != abstraction.num_states) throw std::invalid_argument("one representative slot per state");

  // Markov condition on the raw rows, against each class representative.
  for (const History& h : dynamics.histories()) {
    const std::size_t s = abstraction.map(h);
    const auto& rep = reps.at(s);
    if (!rep) throw std::invalid_argument("state " + std::to_string(s) + " is reached but has no representative");
    if (abstraction.map(*rep) != s) throw std::invalid_argument("representative is not in its class");
    for (std::uint32_t a = 0; a < sig.num_actions; ++a) {
      const double gap = row_distance(dynamics.row(h, ActionId{a}), dynamics.row(*rep, ActionId{a}));
      if (gap > tolerance) {
        throw NotMarkovError("histories '" + to_string(h) + "' and '" + to_string(*rep) + "' share state " +
                             std::to_string(s) + " but their rows differ by " + std::to_string(gap));
      }
    }
  }

  std::vector<Pdfa::State> states(abstraction.num_states);
  for (std::size_t s = 0; s < abstraction.num_states; ++s) {
    const auto& rep = reps[s];
    if (!rep) {
      // Unreached state: absorbing terminal placeholder so the automaton stays well formed.
      states[s].termination[ActionId{0}] = 1.0;
      continue;
    }
    History extended = *rep;
    extended.emplace_back();
    for (std::uint32_t a = 0; a < sig.num_actions; ++a) {
      const ActionId action{a};
      const double pa = policy(s, action);
      const DynamicsRow& row = dynamics.row(*rep, action);
      for (const auto& o : row.outcomes) {
        const StepSymbol symbol{action, o.observation, o.reward};
        extended.back() = symbol;
        states[s].transitions[symbol] = static_cast<std::uint32_t>(abstraction.map(extended));
        states[s].emission[symbol] = pa * o.probability;
      }
      if (row.termination > 0.0 || pa > 0.0) states[s].termination[action] = pa * row.termination;
    }
  }
  return Pdfa(std::move(states), static_cast<std::uint32_t>(abstraction.map(HistoryView{})));
}

}  // namespace nmrl::oracles
