#include "nmrl/envs/analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

#include "nmrl/errors.hpp"

namespace nmrl::envs {

std::map<Latent, double> latent_posterior(const DomainModel& model, HistoryView history) {
  std::map<Latent, double> belief{{model.initial(), 1.0}};
  std::vector<Transition> scratch;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& s = history[i];
    std::map<Latent, double> next;
    double mass = 0.0;
    for (const auto& [latent, p] : belief) {
      if (latent.terminated) continue;
      scratch.clear();
      model.transitions(latent, s.action, scratch);
      for (const auto& t : scratch) {
        if (t.observation != s.observation || t.reward != s.reward) continue;
        next[t.next] += p * t.probability;
        mass += p * t.probability;
      }
    }
    if (mass <= 0.0) {
      throw ZeroProbabilityHistoryError("history has probability zero at step " + std::to_string(i) + ": " +
                                        to_string(history));
    }
    for (auto& [latent, p] : next) p /= mass;
    belief = std::move(next);
  }
  return belief;
}

std::int64_t ground_truth_label(const DomainModel& model, HistoryView history) {
  const auto posterior = latent_posterior(model, history);
  const std::int64_t label = model.label(posterior.begin()->first);
  for (const auto& [latent, p] : posterior) {
    if (model.label(latent) != label) {
      throw std::logic_error("ground-truth label is not determined by the history " + to_string(history));
    }
  }
  return label;
}

TabularNmdp as_tabular(const DomainModel& model, std::size_t horizon, std::size_t budget) {
  horizon = std::min<std::size_t>(horizon, model.horizon());
  std::vector<Transition> scratch;
  auto generator = [&](HistoryView h, ActionId a) {
    DynamicsRow row;
    for (const auto& [latent, p] : latent_posterior(model, h)) {
      if (latent.terminated) {
        row.termination += p;
        continue;
      }
      scratch.clear();
      model.transitions(latent, a, scratch);
      for (const auto& t : scratch) row.outcomes.push_back(Outcome{t.observation, t.reward, p * t.probability});
    }
    row.normalize_layout();
    return row;
  };
  return TabularNmdp::enumerate(model.signature(), horizon, generator, budget, kDerivedRowTolerance);
}

TabularNmdp as_tabular(const EnvConfig& config, std::size_t horizon, std::size_t budget) {
  return as_tabular(*make_domain(config), horizon, budget);
}

TotalAbstraction ground_truth_abstraction(const DomainModel& model, const TabularNmdp& table) {
  auto index = std::make_shared<std::map<History, std::size_t>>();
  std::map<std::int64_t, std::size_t> dense;
  for (const auto& h : table.histories()) {
    const std::int64_t label = ground_truth_label(model, h);
    const auto [it, inserted] = dense.emplace(label, dense.size());
    index->emplace(h, it->second);
  }
  return TotalAbstraction{dense.size(), [index](HistoryView h) {
                            const auto it = index->find(History(h.begin(), h.end()));
                            if (it == index->end()) throw std::out_of_range("history outside the table: " + to_string(h));
                            return it->second;
                          }};
}

ReferenceAutomaton reference_automaton(const DomainModel& model, const KeyFunction& key, std::size_t max_depth) {
  ReferenceAutomaton out;
  std::map<std::int64_t, std::uint32_t> state_of;
  auto intern = [&](std::int64_t label) {
    const auto [it, inserted] = state_of.emplace(label, static_cast<std::uint32_t>(out.labels.size()));
    if (inserted) out.labels.push_back(label);
    return it->second;
  };

  std::set<Latent> seen;
  std::deque<std::pair<Latent, std::size_t>> frontier;
  const Latent start = model.initial();
  intern(model.label(start));
  seen.insert(start);
  frontier.emplace_back(start, 0);
  std::vector<Transition> scratch;
  while (!frontier.empty()) {
    const auto [latent, depth] = frontier.front();
    frontier.pop_front();
    if (latent.terminated || depth >= max_depth) continue;
    const std::uint32_t from = state_of.at(model.label(latent));
    for (std::uint32_t a = 0; a < model.signature().num_actions; ++a) {
      scratch.clear();
      model.transitions(latent, ActionId{a}, scratch);
      for (const auto& t : scratch) {
        const std::uint32_t to = intern(model.label(t.next));
        const auto [it, inserted] = out.edges.emplace(std::pair{from, key(StepSymbol{ActionId{a}, t.observation, t.reward})}, to);
        if (!inserted && it->second != to) {
          throw std::logic_error("labels do not form a deterministic automaton under the given keys");
        }
        if (seen.insert(t.next).second) frontier.emplace_back(t.next, depth + 1);
      }
    }
  }
  return out;
}

}  // namespace nmrl::envs
