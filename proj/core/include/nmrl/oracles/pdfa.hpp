#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "nmrl/abstraction.hpp"
#include "nmrl/oracles/dynamics.hpp"
#include "nmrl/tabular.hpp"

namespace nmrl::oracles {

/// Probabilistic deterministic automaton over the AOR alphabet with the
/// termination alphabet A⊥ (one termination letter per action).
class Pdfa {
 public:
  struct State {
    std::map<StepSymbol, std::uint32_t> transitions;  // partial τ
    std::map<StepSymbol, double> emission;            // λ(q, aor)
    std::map<ActionId, double> termination;           // λ(q, a⊥)
  };

  Pdfa(std::vector<State> states, std::uint32_t initial);

  /// Every λ row sums to one within `tolerance` and every state has a
  /// positive-probability path to termination. Throws std::invalid_argument.
  void validate(double tolerance = kExactRowTolerance) const;

  [[nodiscard]] std::size_t num_states() const { return states_.size(); }
  [[nodiscard]] std::uint32_t initial() const { return initial_; }
  [[nodiscard]] const State& state(std::uint32_t q) const { return states_.at(q); }
  /// τ*(q0, w); nullopt when the run leaves the defined transitions.
  [[nodiscard]] std::optional<std::uint32_t> run(HistoryView w) const;

 private:
  std::vector<State> states_;
  std::uint32_t initial_;
};

/// A(e | ε): product of λ along the run, times the terminal λ.
/// Throws UndefinedTransitionError if the run leaves the defined graph.
double pdfa_episode_probability(const Pdfa& pdfa, const Episode& episode);

/// π(a | s) for a Markov policy on abstract states.
using StatePolicy = std::function<double(std::size_t state, ActionId)>;

/// Shortest history (lexicographic tiebreak) of every abstract state among
/// the table's histories; states never reached get an empty optional.
std::vector<std::optional<History>> default_representatives(const TabularNmdp& dynamics,
                                                            const TotalAbstraction& abstraction);

/// The automaton whose iterated transition function is the abstraction and
/// whose distribution is the process dynamics under π∘α:
///   τ(s, aor) = α(h_s·aor),  λ(s, aor) = π(a|s)·D(or|h_s,a),
///   λ(s, a⊥) = π(a|s)·D(⊥|h_s,a).
/// `representatives` defaults to `default_representatives`. Throws
/// NotMarkovError if two histories of one class have different rows, and
/// std::invalid_argument if a reached state lacks a representative.
Pdfa build_abstraction_automaton(const TotalAbstraction& abstraction, const StatePolicy& policy,
                                 const TabularNmdp& dynamics,
                                 std::optional<std::vector<std::optional<History>>> representatives = std::nullopt,
                                 double tolerance = kExactRowTolerance);

}  // namespace nmrl::oracles
