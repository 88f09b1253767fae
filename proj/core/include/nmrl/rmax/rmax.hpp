#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmrl/abstraction.hpp"
#include "nmrl/types.hpp"

namespace nmrl::rmax {

struct RmaxParams {
  std::uint64_t m0 = 1000;
  double gamma = 0.909;
  double v_max = 1098.9;
  /// Value-iteration stopping threshold; a non-positive value selects 1e-4·(1−γ).
  double vi_tolerance = 0.0;
  double delta_m = 0.01;
  std::uint64_t max_sweeps = 100'000;

  void validate() const;
  [[nodiscard]] double tolerance() const { return vi_tolerance > 0.0 ? vi_tolerance : 1e-4 * (1.0 - gamma); }
  bool operator==(const RmaxParams&) const = default;
};

/// Where a step led, from the agent's point of view.
struct NextState {
  enum class Kind : std::uint8_t { Safe, Frontier, Terminated };
  Kind kind = Kind::Terminated;
  std::uint32_t id = 0;

  static NextState safe(std::uint32_t id) { return {Kind::Safe, id}; }
  /// A candidate, or a history the abstraction does not cover yet.
  static NextState frontier() { return {Kind::Frontier, 0}; }
  static NextState terminated() { return {Kind::Terminated, 0}; }
  bool operator==(const NextState&) const = default;
};

struct PlanStats {
  std::uint64_t sweeps = 0;
  double residual = 0.0;
  std::uint64_t plans = 0;
  bool operator==(const PlanStats&) const = default;
};

/// Tabular RMax over the safe states of a (partial) abstraction. Pairs seen
/// fewer than m0 times, and every frontier target, are worth v_max.
class RmaxModel {
 public:
  struct OutcomeCount {
    NextState next;
    RewardId reward;
    std::uint64_t count = 0;
    bool operator==(const OutcomeCount&) const = default;
  };
  struct PairStats {
    std::uint64_t count = 0;
    std::vector<OutcomeCount> outcomes;  // in order of first occurrence
    bool known = false;
    bool operator==(const PairStats&) const = default;
  };

  RmaxModel(std::uint32_t num_actions, std::vector<double> rewards, RmaxParams params);

  /// Records one step from safe state `s`. Throws UnknownStateError when `s`
  /// is not a safe state of the current abstraction version.
  void observe(AbstractState s, ActionId a, RewardId r, NextState next);
  /// Greedy action at safe state `s`, lowest index on ties; replans first if
  /// a pair became known since the last plan.
  ActionId choose(AbstractState s);
  /// Value iteration from the optimistic start. Throws NonConvergenceError
  /// when the sweep cap is hit.
  void plan();
  /// Discards everything when the abstraction's version differs from the
  /// stored one. Returns whether a reset happened; only these resets are
  /// counted by resets().
  bool update(const PartialAbstraction& abstraction);
  /// Discards everything and rebuilds over `num_safe` states.
  void reset(std::size_t num_safe, std::uint64_t version);

  [[nodiscard]] double q(std::uint32_t s, ActionId a) const { return q_[s * num_actions_ + a.index]; }
  [[nodiscard]] double value(std::uint32_t s) const;
  [[nodiscard]] const PairStats& pair(std::uint32_t s, ActionId a) const { return pairs_[s * num_actions_ + a.index]; }
  [[nodiscard]] std::size_t num_states() const { return num_states_; }
  [[nodiscard]] std::uint32_t num_actions() const { return num_actions_; }
  [[nodiscard]] std::uint64_t version() const { return version_; }
  [[nodiscard]] std::uint64_t resets() const { return resets_; }
  [[nodiscard]] bool dirty() const { return dirty_; }
  [[nodiscard]] std::size_t known_pairs() const;
  [[nodiscard]] const PlanStats& plan_stats() const { return plan_stats_; }
  [[nodiscard]] const RmaxParams& params() const { return params_; }

  /// Compares the learned state (counts, flags, Q, version); the reset
  /// counter and plan statistics are bookkeeping and not compared.
  [[nodiscard]] bool same_model(const RmaxModel& other) const;

 private:
  void require_state(AbstractState s) const;

  std::uint32_t num_actions_;
  std::vector<double> rewards_;
  RmaxParams params_;
  std::size_t num_states_ = 0;
  std::uint64_t version_ = 0;
  std::vector<PairStats> pairs_;
  std::vector<double> q_;
  bool dirty_ = false;
  std::uint64_t resets_ = 0;
  PlanStats plan_stats_;
};

}  // namespace nmrl::rmax
