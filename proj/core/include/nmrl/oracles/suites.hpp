#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nmrl/abstraction.hpp"
#include "nmrl/oracles/pdfa.hpp"
#include "nmrl/oracles/pomdp.hpp"
#include "nmrl/tabular.hpp"

namespace nmrl::oracles {

/// A hand-built regular decision process: a finite transducer whose state
/// determines the next-step dynamics, stepped by the emitted (a, o, r).
struct RdpFixture {
  struct Branch {
    ObservationId observation;
    RewardId reward;
    double probability = 0.0;
    std::uint32_t next_state = 0;
  };
  struct Row {
    std::vector<Branch> branches;
    double termination = 0.0;
  };

  std::string name;
  Signature signature;
  std::size_t num_states = 0;
  std::size_t horizon = 0;
  std::vector<std::vector<Row>> rows;  // [state][action]

  [[nodiscard]] std::uint32_t state_of(HistoryView h) const;
  [[nodiscard]] TabularNmdp tabular() const;
  [[nodiscard]] TotalAbstraction abstraction() const;
};

/// Three acyclic RDPs with 2, 3 and 4 states; every episode ends naturally
/// within 3 steps.
std::vector<RdpFixture> rdp_fixtures();

/// Two hidden states, actions {toggle, shuffle}, observations
/// {see0, see1, blank}; the hidden state is seen with probability 0.8 and
/// blanked otherwise; reward 1 iff toggling into hidden state 1.
Pomdp flicker_pomdp();
/// Same dynamics with a noiseless injective observation (an MDP in disguise).
Pomdp fully_observable_pomdp();

/// A 3-observation MDP given as a history process (rows depend on the last
/// observation only), horizon 3.
TabularNmdp observation_mdp_fixture();

struct AutomatonCheck {
  std::string fixture;
  std::size_t episodes = 0;
  double max_deviation = 0.0;        // max_e |A(e|ε) − D_π(e|ε)|
  double total_probability = 0.0;    // Σ_e D_π(e|ε)
  std::size_t run_mismatches = 0;    // histories with τ*(h) ≠ α(h)
  double representative_deviation = 0.0;  // same check with the longest representatives
};

/// Builds the abstraction automaton of `fixture` under `policy` and compares
/// it with the process dynamics on every episode.
AutomatonCheck check_abstraction_automaton(const RdpFixture& fixture, const StatePolicy& policy);

struct BeliefCheck {
  std::size_t histories = 0;
  std::size_t beliefs = 0;
  std::size_t equal_pairs = 0;
  std::size_t violations = 0;       // belief-equal pairs with rows further apart than the tolerance
  double max_row_gap = 0.0;         // over belief-equal pairs
};

/// Enumerates histories to `horizon`, and for every pair with equal beliefs
/// (within `tolerance`) compares the trajectory-sum dynamics rows of all
/// actions. Rows of histories at the horizon are the enumeration cut and are
/// not compared.
BeliefCheck check_belief_abstraction(const Pomdp& pomdp, std::size_t horizon, double tolerance = 1e-9);

struct IdentityCheck {
  double max_deviation = 0.0;
  std::size_t rows = 0;
};

/// Marginalizes an MDP through its last-observation abstraction and
/// compares each induced row with the process row.
IdentityCheck check_identity_marginalization(const TabularNmdp& mdp);

}  // namespace nmrl::oracles
