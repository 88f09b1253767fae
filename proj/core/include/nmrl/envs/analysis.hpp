#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "nmrl/abstraction.hpp"
#include "nmrl/envs/domain.hpp"
#include "nmrl/tabular.hpp"

namespace nmrl::envs {

/// Exact dynamics of `model` up to min(horizon, model horizon) steps.
/// Rows of histories that ended by absorption terminate with probability one.
TabularNmdp as_tabular(const DomainModel& model, std::size_t horizon, std::size_t budget = kDefaultTableBudget);
TabularNmdp as_tabular(const EnvConfig& config, std::size_t horizon, std::size_t budget = kDefaultTableBudget);

/// Posterior over latent states after `history` (exact filtering).
/// Throws ZeroProbabilityHistoryError for impossible histories.
std::map<Latent, double> latent_posterior(const DomainModel& model, HistoryView history);

/// Ground-truth label of a history. Throws std::logic_error if the posterior
/// mixes latents with different labels.
std::int64_t ground_truth_label(const DomainModel& model, HistoryView history);

/// The ground-truth labels of the histories in `table`, renumbered densely in
/// order of first appearance.
TotalAbstraction ground_truth_abstraction(const DomainModel& model, const TabularNmdp& table);

using KeyFunction = std::function<std::uint64_t(const StepSymbol&)>;

/// Deterministic automaton over labels: edges label --key--> label for every
/// positive-probability step from every reachable latent (within `max_depth`
/// steps). State 0 is the initial label; states are numbered in breadth-first
/// order of discovery. Throws std::logic_error if a (state, key) pair leads to
/// two different labels.
struct ReferenceAutomaton {
  std::vector<std::int64_t> labels;
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint32_t> edges;
  [[nodiscard]] std::size_t num_states() const { return labels.size(); }
};

ReferenceAutomaton reference_automaton(const DomainModel& model, const KeyFunction& key, std::size_t max_depth);

}  // namespace nmrl::envs
