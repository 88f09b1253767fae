#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "nmrl/types.hpp"

namespace nmrl {

inline constexpr double kExactRowTolerance = 1e-12;
inline constexpr double kDerivedRowTolerance = 1e-9;
inline constexpr std::size_t kDefaultTableBudget = 10'000'000;

struct Outcome {
  ObservationId observation;
  RewardId reward;
  double probability = 0.0;
  bool operator==(const Outcome&) const = default;
};

/// Distribution over (observation, reward) pairs plus termination for one
/// (history, action). Outcomes are kept sorted by (observation, reward) with
/// no duplicates and no zero entries.
struct DynamicsRow {
  std::vector<Outcome> outcomes;
  double termination = 0.0;

  [[nodiscard]] double total() const;
  [[nodiscard]] double probability(ObservationId o, RewardId r) const;
  /// Sorts, merges duplicate (o, r) entries and drops zeros.
  void normalize_layout();
  bool operator==(const DynamicsRow&) const = default;
};

/// Max-norm difference between two rows over the union of their supports.
double row_distance(const DynamicsRow& a, const DynamicsRow& b);

/// Explicit dynamics of a small process: every positive-probability history up
/// to `horizon` steps, each with one row per action. Histories of exactly
/// `horizon` steps are cut: their rows terminate with probability one.
class TabularNmdp {
 public:
  using Generator = std::function<DynamicsRow(HistoryView, ActionId)>;

  /// Breadth-first enumeration from the empty history. Rows returned by the
  /// generator must sum to one within `tolerance`.
  /// Throws BudgetExceededError when histories × actions exceeds `budget`.
  static TabularNmdp enumerate(Signature signature, std::size_t horizon, const Generator& generator,
                               std::size_t budget = kDefaultTableBudget,
                               double tolerance = kExactRowTolerance);

  [[nodiscard]] const Signature& signature() const { return signature_; }
  [[nodiscard]] std::size_t horizon() const { return horizon_; }
  [[nodiscard]] bool contains(HistoryView h) const;
  /// Throws std::out_of_range for histories outside the table.
  [[nodiscard]] const DynamicsRow& row(HistoryView h, ActionId a) const;
  /// True when `h` sits at the horizon and its rows are the forced cut.
  [[nodiscard]] bool truncated(HistoryView h) const { return h.size() >= horizon_; }
  /// Reachable histories in breadth-first (length, then lexicographic) order.
  [[nodiscard]] const std::vector<History>& histories() const { return order_; }
  [[nodiscard]] std::size_t entries() const { return order_.size() * signature_.num_actions; }

 private:
  Signature signature_;
  std::size_t horizon_ = 0;
  std::map<History, std::vector<DynamicsRow>> rows_;
  std::vector<History> order_;
};

}  // namespace nmrl
