#include "nmrl/oracles/suites.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nmrl/induced_mdp.hpp"
#include "nmrl/oracles/dynamics.hpp"

namespace nmrl::oracles {

namespace {

using Branch = RdpFixture::Branch;
using Row = RdpFixture::Row;

constexpr ObservationId O0{0};
constexpr ObservationId O1{1};
constexpr RewardId R0{0};
constexpr RewardId R1{1};

Signature binary_signature() {
  Signature sig;
  sig.num_actions = 2;
  sig.num_observations = 2;
  sig.rewards = {0.0, 1.0};
  return sig;
}

Row terminal_row() { return Row{{}, 1.0}; }

}  // namespace

std::uint32_t RdpFixture::state_of(HistoryView h) const {
  std::uint32_t state = 0;
  for (const auto& s : h) {
    const auto& row = rows.at(state).at(s.action.index);
    const auto it = std::find_if(row.branches.begin(), row.branches.end(), [&](const Branch& b) {
      return b.observation == s.observation && b.reward == s.reward;
    });
    if (it == row.branches.end()) throw std::out_of_range("history leaves fixture " + name + ": " + to_string(h));
    state = it->next_state;
  }
  return state;
}

TabularNmdp RdpFixture::tabular() const {
  return TabularNmdp::enumerate(signature, horizon, [this](HistoryView h, ActionId a) {
    const Row& row = rows.at(state_of(h)).at(a.index);
    DynamicsRow out;
    out.termination = row.termination;
    for (const auto& b : row.branches) out.outcomes.push_back(Outcome{b.observation, b.reward, b.probability});
    return out;
  });
}

TotalAbstraction RdpFixture::abstraction() const {
  return TotalAbstraction{num_states, [this](HistoryView h) -> std::size_t { return state_of(h); }};
}

std::vector<RdpFixture> rdp_fixtures() {
  std::vector<RdpFixture> out;

  RdpFixture two{"two-state", binary_signature(), 2, 3, {}};
  two.rows = {
      {Row{{Branch{O0, R0, 0.3, 1}, Branch{O1, R1, 0.7, 1}}, 0.0}, Row{{Branch{O1, R0, 0.5, 1}}, 0.5}},
      {terminal_row(), terminal_row()},
  };
  out.push_back(std::move(two));

  RdpFixture three{"three-state", binary_signature(), 3, 3, {}};
  three.rows = {
      {Row{{Branch{O0, R0, 0.6, 1}, Branch{O1, R1, 0.4, 2}}, 0.0},
       Row{{Branch{O0, R0, 0.2, 1}, Branch{O1, R0, 0.8, 2}}, 0.0}},
      {Row{{Branch{O0, R1, 0.5, 2}, Branch{O1, R0, 0.5, 2}}, 0.0}, Row{{Branch{O1, R1, 0.75, 2}}, 0.25}},
      {terminal_row(), terminal_row()},
  };
  out.push_back(std::move(three));

  // s2 is reached both directly and through s1, so classes hold histories of
  // different lengths.
  RdpFixture four{"four-state", binary_signature(), 4, 3, {}};
  four.rows = {
      {Row{{Branch{O0, R0, 0.5, 1}, Branch{O1, R0, 0.4, 2}}, 0.1},
       Row{{Branch{O0, R1, 0.3, 2}, Branch{O1, R0, 0.6, 1}}, 0.1}},
      {Row{{Branch{O0, R1, 0.7, 2}}, 0.3}, Row{{Branch{O0, R0, 0.4, 3}, Branch{O1, R1, 0.6, 2}}, 0.0}},
      {Row{{Branch{O0, R0, 1.0, 3}}, 0.0}, Row{{Branch{O1, R1, 0.5, 3}}, 0.5}},
      {terminal_row(), terminal_row()},
  };
  out.push_back(std::move(four));
  return out;
}

namespace {

Pomdp two_hidden_state_pomdp(double see_probability, bool with_blank) {
  Pomdp p;
  p.signature.num_actions = 2;  // 0 = toggle, 1 = shuffle
  p.signature.num_observations = with_blank ? 3 : 2;
  p.signature.rewards = {0.0, 1.0};
  if (with_blank) p.signature.blank_observation = ObservationId{2};
  p.num_hidden = 2;
  p.initial = 0;
  p.transition = {{{0.0, 1.0}, {0.5, 0.5}}, {{1.0, 0.0}, {0.5, 0.5}}};
  p.observation.assign(2, std::vector<std::vector<double>>(2, std::vector<double>(p.signature.num_observations)));
  p.termination.assign(2, std::vector<double>(2, 0.0));
  p.reward.assign(2, std::vector<std::vector<std::vector<double>>>(
                         2, std::vector<std::vector<double>>(p.signature.num_observations, {1.0, 0.0})));
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t a = 0; a < 2; ++a) {
      p.observation[x][a][x] = see_probability;
      if (with_blank) p.observation[x][a][2] = 1.0 - see_probability;
    }
  }
  for (std::size_t o = 0; o < p.signature.num_observations; ++o) p.reward[1][0][o] = {0.0, 1.0};
  return p;
}

}  // namespace

Pomdp flicker_pomdp() { return two_hidden_state_pomdp(0.8, true); }

Pomdp fully_observable_pomdp() { return two_hidden_state_pomdp(1.0, false); }

TabularNmdp observation_mdp_fixture() {
  Signature sig;
  sig.num_actions = 2;
  sig.num_observations = 3;
  sig.rewards = {0.0, 2.0};
  return TabularNmdp::enumerate(sig, 3, [](HistoryView h, ActionId a) {
    DynamicsRow row;
    if (h.empty()) {
      row.outcomes = {Outcome{ObservationId{0}, RewardId{0}, 0.5}, Outcome{ObservationId{1}, RewardId{0}, 0.5}};
      return row;
    }
    const std::uint32_t last = h.back().observation.index;
    const std::uint32_t moved = (last + a.index + 1) % 3;
    row.termination = last == 2 ? 0.2 : 0.0;
    row.outcomes = {Outcome{ObservationId{moved}, RewardId{1}, 0.7 - row.termination},
                    Outcome{ObservationId{last}, RewardId{0}, 0.3}};
    return row;
  });
}

AutomatonCheck check_abstraction_automaton(const RdpFixture& fixture, const StatePolicy& policy) {
  AutomatonCheck report;
  report.fixture = fixture.name;
  const TabularNmdp table = fixture.tabular();
  const TotalAbstraction alpha = fixture.abstraction();
  const Pdfa automaton = build_abstraction_automaton(alpha, policy, table);
  automaton.validate();

  const StochasticPolicy lifted = [&](HistoryView h, ActionId a) { return policy(alpha.map(h), a); };
  const auto episodes = enumerate_episodes(table);
  report.episodes = episodes.size();
  for (const auto& e : episodes) {
    const double d = dynamics_under_policy(table, lifted, e);
    report.total_probability += d;
    report.max_deviation = std::max(report.max_deviation, std::abs(pdfa_episode_probability(automaton, e) - d));
  }
  for (const auto& h : table.histories()) {
    const auto q = automaton.run(h);
    if (!q || *q != alpha.map(h)) ++report.run_mismatches;
  }

  // Longest (last in breadth-first order) representative of every class.
  std::vector<std::optional<History>> longest(alpha.num_states);
  for (const auto& h : table.histories()) longest[alpha.map(h)] = h;
  const Pdfa alternative = build_abstraction_automaton(alpha, policy, table, longest);
  for (const auto& e : episodes) {
    report.representative_deviation =
        std::max(report.representative_deviation,
                 std::abs(pdfa_episode_probability(alternative, e) - pdfa_episode_probability(automaton, e)));
  }
  return report;
}

BeliefCheck check_belief_abstraction(const Pomdp& pomdp, std::size_t horizon, double tolerance) {
  BeliefCheck report;
  const TabularNmdp table = pomdp_as_tabular(pomdp, horizon);
  const auto reachable = enumerate_reachable_beliefs(pomdp, horizon, tolerance);
  report.beliefs = reachable.beliefs.size();

  std::vector<const History*> histories;
  std::vector<BeliefState> beliefs;
  for (const auto& h : table.histories()) {
    ++report.histories;
    if (table.truncated(h)) continue;
    histories.push_back(&h);
    beliefs.push_back(belief_update(pomdp, h));
  }
  for (std::size_t i = 0; i < histories.size(); ++i) {
    for (std::size_t j = i + 1; j < histories.size(); ++j) {
      if (max_norm_distance(beliefs[i], beliefs[j]) > tolerance) continue;
      ++report.equal_pairs;
      double gap = 0.0;
      for (std::uint32_t a = 0; a < pomdp.signature.num_actions; ++a) {
        gap = std::max(gap, row_distance(table.row(*histories[i], ActionId{a}), table.row(*histories[j], ActionId{a})));
      }
      report.max_row_gap = std::max(report.max_row_gap, gap);
      if (gap > tolerance) ++report.violations;
    }
  }
  return report;
}

IdentityCheck check_identity_marginalization(const TabularNmdp& mdp) {
  IdentityCheck report;
  const auto alpha = last_observation_abstraction(mdp.signature());
  const InducedMdp induced = marginalize(mdp, alpha);
  for (const auto& h : mdp.histories()) {
    if (mdp.truncated(h)) continue;
    for (std::uint32_t a = 0; a < mdp.signature().num_actions; ++a) {
      const DynamicsRow& process = mdp.row(h, ActionId{a});
      const auto& row = induced.row(alpha.map(h), ActionId{a});
      ++report.rows;
      if (!row) {
        report.max_deviation = 1.0;
        continue;
      }
      // Under the identity abstraction the next state is the observation itself.
      double gap = std::abs(row->termination - process.termination);
      for (const auto& o : process.outcomes) {
        gap = std::max(gap, std::abs(row->probability(o.observation.index, o.reward) - o.probability));
      }
      gap = std::max(gap, std::abs(row->total() - process.total()));
      report.max_deviation = std::max(report.max_deviation, gap);
    }
  }
  return report;
}

}  // namespace nmrl::oracles
