#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nmrl/types.hpp"

namespace nmrl {

enum class NodeKind : std::uint8_t { Safe, Candidate };

/// A state of a (partial) abstraction. Safe and candidate ids live in
/// separate id spaces; safe ids are dense and stable across versions.
struct AbstractState {
  std::uint32_t id = 0;
  NodeKind kind = NodeKind::Safe;
  auto operator<=>(const AbstractState&) const = default;
  [[nodiscard]] bool safe() const { return kind == NodeKind::Safe; }
};

/// History -> Safe(s) | Candidate(s) | Undefined (std::nullopt).
class PartialAbstraction {
 public:
  virtual ~PartialAbstraction() = default;

  [[nodiscard]] virtual std::optional<AbstractState> lookup(HistoryView history) const = 0;

  /// State of `history · symbol` given that `history` maps to `from`.
  /// The default re-walks the extended history; implementations backed by a
  /// transition graph override it with a single edge lookup.
  [[nodiscard]] virtual std::optional<AbstractState> next(AbstractState from, HistoryView history,
                                                          const StepSymbol& symbol) const;

  [[nodiscard]] virtual std::uint64_t version() const { return 0; }
  /// Safe states are numbered 0 .. num_safe()-1.
  [[nodiscard]] virtual std::size_t num_safe() const = 0;
};

/// A total abstraction over states {0, ..., num_states-1}.
struct TotalAbstraction {
  std::size_t num_states = 0;
  std::function<std::size_t(HistoryView)> map;
};

/// Adapts a total abstraction to the partial interface (every state Safe).
class FunctionAbstraction final : public PartialAbstraction {
 public:
  explicit FunctionAbstraction(TotalAbstraction abstraction) : abstraction_(std::move(abstraction)) {}
  [[nodiscard]] std::optional<AbstractState> lookup(HistoryView history) const override;
  [[nodiscard]] std::size_t num_safe() const override { return abstraction_.num_states; }

 private:
  TotalAbstraction abstraction_;
};

struct AbstractStep {
  ActionId action;
  AbstractState state;
  RewardId reward;
  auto operator<=>(const AbstractStep&) const = default;
};

/// s0 a1 s1 r1 ... aj sj rj. When the abstraction is undefined somewhere,
/// `steps` holds the defined prefix and `undefined_at` the 0-based index of
/// the first step whose resulting state is undefined (0 with no `initial`
/// when the empty history itself is undefined).
struct AbstractedHistory {
  std::optional<AbstractState> initial;
  std::vector<AbstractStep> steps;
  std::optional<std::size_t> undefined_at;
  bool operator==(const AbstractedHistory&) const = default;
};

AbstractedHistory apply_abstraction_star(const PartialAbstraction& abstraction, HistoryView history);

/// Markov policy on abstract states; returns nullopt where it has no action.
using MarkovPolicy = std::function<std::optional<ActionId>(AbstractState)>;
using HistoryPolicy = std::function<std::optional<ActionId>(HistoryView)>;

/// h -> policy(abstraction(h)). The returned callable holds a reference to
/// `abstraction`, which must outlive it.
HistoryPolicy epsilon_optimal_lift(MarkovPolicy policy, const PartialAbstraction& abstraction);

}  // namespace nmrl
