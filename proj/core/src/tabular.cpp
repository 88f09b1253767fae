#include "nmrl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <tuple>

#include "nmrl/errors.hpp"

namespace nmrl {

double DynamicsRow::total() const {
  double sum = termination;
  for (const auto& o : outcomes) sum += o.probability;
  return sum;
}

double DynamicsRow::probability(ObservationId o, RewardId r) const {
  for (const auto& out : outcomes) {
    if (out.observation == o && out.reward == r) return out.probability;
  }
  return 0.0;
}

void DynamicsRow::normalize_layout() {
  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) {
    return std::tie(a.observation, a.reward) < std::tie(b.observation, b.reward);
  });
  std::vector<Outcome> merged;
  merged.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (!merged.empty() && merged.back().observation == o.observation && merged.back().reward == o.reward) {
      merged.back().probability += o.probability;
    } else {
      merged.push_back(o);
    }
  }
  std::erase_if(merged, [](const Outcome& o) { return o.probability == 0.0; });
  outcomes = std::move(merged);
}

double row_distance(const DynamicsRow& a, const DynamicsRow& b) {
  double worst = std::abs(a.termination - b.termination);
  for (const auto& o : a.outcomes) {
    worst = std::max(worst, std::abs(o.probability - b.probability(o.observation, o.reward)));
  }
  for (const auto& o : b.outcomes) {
    worst = std::max(worst, std::abs(o.probability - a.probability(o.observation, o.reward)));
  }
  return worst;
}

TabularNmdp TabularNmdp::enumerate(Signature signature, std::size_t horizon, const Generator& generator,
                                   std::size_t budget, double tolerance) {
  signature.validate();
  TabularNmdp table;
  table.signature_ = std::move(signature);
  table.horizon_ = horizon;

  const std::uint32_t num_actions = table.signature_.num_actions;
  DynamicsRow cut;
  cut.termination = 1.0;

  std::deque<History> frontier;
  frontier.emplace_back();
  while (!frontier.empty()) {
    History h = std::move(frontier.front());
    frontier.pop_front();
    if ((table.order_.size() + 1) * num_actions > budget) {
      throw BudgetExceededError("tabular enumeration exceeds " + std::to_string(budget) + " entries");
    }
    std::vector<DynamicsRow> rows;
    rows.reserve(num_actions);
    const bool at_horizon = h.size() >= horizon;
    for (std::uint32_t a = 0; a < num_actions; ++a) {
      if (at_horizon) {
        rows.push_back(cut);
        continue;
      }
      DynamicsRow row = generator(h, ActionId{a});
      for (const auto& o : row.outcomes) {
        if (o.probability < 0.0 || o.probability > 1.0 + tolerance || !std::isfinite(o.probability)) {
          throw std::invalid_argument("row probability out of [0,1] at " + to_string(h));
        }
        if (o.observation.index >= table.signature_.num_observations ||
            o.reward.index >= table.signature_.num_rewards()) {
          throw std::invalid_argument("row outcome outside the signature at " + to_string(h));
        }
      }
      row.normalize_layout();
      if (std::abs(row.total() - 1.0) > tolerance) {
        throw std::invalid_argument("dynamics row at " + to_string(h) + " action " + std::to_string(a) +
                                    " sums to " + std::to_string(row.total()));
      }
      for (const auto& o : row.outcomes) {
        History next = h;
        next.push_back(StepSymbol{ActionId{a}, o.observation, o.reward});
        frontier.push_back(std::move(next));
      }
      rows.push_back(std::move(row));
    }
    table.order_.push_back(h);
    table.rows_.emplace(std::move(h), std::move(rows));
  }
  return table;
}

bool TabularNmdp::contains(HistoryView h) const { return rows_.contains(History(h.begin(), h.end())); }

const DynamicsRow& TabularNmdp::row(HistoryView h, ActionId a) const {
  const auto it = rows_.find(History(h.begin(), h.end()));
  if (it == rows_.end()) throw std::out_of_range("history not in table: " + to_string(h));
  return it->second.at(a.index);
}

}  // namespace nmrl
