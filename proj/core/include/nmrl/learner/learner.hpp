#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmrl/abstraction.hpp"
#include "nmrl/types.hpp"

namespace nmrl::learner {

enum class ExplorationPolicy { Uniform, SingleRandomAction };

std::string_view to_string(ExplorationPolicy policy);
ExplorationPolicy parse_exploration(std::string_view name);

struct LearnerParams {
  double mu = 0.35;
  std::uint32_t delay = 1;
  std::uint32_t n_max = 10;
  double delta_a = 0.1;
  bool observation_only = false;
  ExplorationPolicy exploration = ExplorationPolicy::Uniform;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  bool operator==(const LearnerParams&) const = default;
};

using TransitionKey = std::uint32_t;

/// Packs (a, o, r) into one integer, or keeps o alone in observation-only mode.
class KeyCodec {
 public:
  KeyCodec(const Signature& signature, bool observation_only);

  [[nodiscard]] TransitionKey encode(const StepSymbol& s) const {
    if (observation_only_) return s.observation.index;
    return (s.action.index * num_observations_ + s.observation.index) * num_rewards_ + s.reward.index;
  }
  /// (a, o, r) of a full key; only the observation is meaningful in
  /// observation-only mode.
  [[nodiscard]] StepSymbol decode(TransitionKey key) const;
  [[nodiscard]] std::uint32_t alphabet_size() const { return alphabet_; }
  /// The key one past the alphabet marks the end of an episode inside a future window.
  [[nodiscard]] TransitionKey terminal_key() const { return alphabet_; }
  [[nodiscard]] bool observation_only() const { return observation_only_; }

 private:
  std::uint32_t num_observations_;
  std::uint32_t num_rewards_;
  std::uint32_t alphabet_;
  bool observation_only_;
};

TransitionKey transition_key(const StepSymbol& symbol, const Signature& signature, bool observation_only);

/// Counts of the length-1..d prefixes of the futures seen after a node.
/// An episode ending inside the window contributes its terminal-augmented
/// prefix (the remaining keys followed by the terminal key).
class FutureStats {
 public:
  using Prefix = std::vector<TransitionKey>;

  /// Records one future: `keys` are the symbols following the node (the
  /// caller passes at most `delay` of them); `ended` tells whether the
  /// episode ended right after them.
  void add(std::span<const TransitionKey> keys, bool ended, TransitionKey terminal);

  [[nodiscard]] std::uint64_t samples() const { return samples_; }
  [[nodiscard]] const std::map<Prefix, std::uint64_t>& prefix_counts() const { return counts_; }
  [[nodiscard]] std::uint64_t count(const Prefix& prefix) const;
  [[nodiscard]] double frequency(const Prefix& prefix) const;

  bool operator==(const FutureStats&) const = default;

 private:
  std::uint64_t samples_ = 0;
  std::map<Prefix, std::uint64_t> counts_;
};

/// max over prefixes w of |count1(w)/N1 − count2(w)/N2|. Both must have samples.
double prefix_linf_distance(const FutureStats& a, const FutureStats& b);

/// Number of prefixes a window of `delay` keys can produce over an alphabet
/// of `alphabet` keys, terminal-augmented ones included.
double future_prefix_count(std::uint32_t alphabet, std::uint32_t delay);
/// Per-test failure budget: δ_a split over every test a run can make.
double test_confidence(const LearnerParams& params, std::uint32_t alphabet);
/// ceil(16/μ² · ln(2(S + 1)/δ_test)).
std::uint64_t sample_size_threshold(double mu, double delta_test, double prefix_count);
std::uint64_t sample_size_threshold(const LearnerParams& params, std::uint32_t alphabet);

struct SafeNode {
  std::uint32_t id = 0;
  std::vector<std::optional<AbstractState>> out;  // indexed by transition key
  FutureStats frozen;
};

struct CandidateNode {
  std::uint32_t id = 0;
  std::optional<std::uint32_t> parent;  // empty for the root candidate
  TransitionKey key = 0;
  FutureStats stats;
};

enum class EventKind { Promote, Merge };

struct GraphEvent {
  EventKind kind = EventKind::Promote;
  std::uint32_t candidate = 0;
  std::uint32_t safe = 0;  // the new safe id, or the merge target
  std::optional<std::uint32_t> parent;
  TransitionKey key = 0;
  std::uint64_t samples = 0;
  std::uint64_t version = 0;  // version after the event
  std::uint64_t episode = 0;  // number of episodes consumed when it fired
  bool operator==(const GraphEvent&) const = default;
};

struct Decision {
  enum class Kind { Wait, Promote, Merge };
  Kind kind = Kind::Wait;
  std::uint32_t target = 0;  // merge target
  bool operator==(const Decision&) const = default;
};

/// The learner's hypothesis: a deterministic graph of safe nodes whose
/// missing edges lead to candidate nodes gathering future statistics.
class HypothesisGraph final : public PartialAbstraction {
 public:
  HypothesisGraph(const Signature& signature, LearnerParams params);

  // PartialAbstraction
  [[nodiscard]] std::optional<AbstractState> lookup(HistoryView history) const override;
  [[nodiscard]] std::optional<AbstractState> next(AbstractState from, HistoryView history,
                                                  const StepSymbol& symbol) const override;
  [[nodiscard]] std::uint64_t version() const override { return version_; }
  [[nodiscard]] std::size_t num_safe() const override { return safe_.size(); }

  /// Same as lookup.
  [[nodiscard]] std::optional<AbstractState> route(HistoryView history) const { return lookup(history); }

  /// Routes the episode from the root. The first candidate on the route (one
  /// is spawned when the walk leaves the safe region through a missing edge)
  /// records the episode's future after it, then may be resolved.
  /// Throws StateBudgetExhaustedError when a promotion would exceed n_max.
  void consume(HistoryView episode);

  [[nodiscard]] Decision decide(std::uint32_t candidate) const;

  [[nodiscard]] const std::vector<SafeNode>& safe_nodes() const { return safe_; }
  [[nodiscard]] const std::map<std::uint32_t, CandidateNode>& candidates() const { return candidates_; }
  [[nodiscard]] std::size_t num_candidates() const { return candidates_.size(); }
  [[nodiscard]] const std::vector<GraphEvent>& events() const { return events_; }
  [[nodiscard]] std::uint64_t episodes_consumed() const { return episodes_; }
  [[nodiscard]] std::uint64_t threshold() const { return n_min_; }
  [[nodiscard]] const KeyCodec& codec() const { return codec_; }
  [[nodiscard]] const LearnerParams& params() const { return params_; }
  /// Promote + merge events a run can make: n_max · (|Σ| + 1) + 1.
  [[nodiscard]] std::uint64_t event_bound() const;

  /// Overrides the sample-size threshold (testing aid).
  void set_threshold(std::uint64_t n_min) { n_min_ = n_min; }

  /// One line per node: safe nodes by id, then candidates by id.
  [[nodiscard]] std::string dump() const;

 private:
  void apply(std::uint32_t candidate, const Decision& decision);

  KeyCodec codec_;
  LearnerParams params_;
  std::uint64_t n_min_;
  std::vector<SafeNode> safe_;
  std::map<std::uint32_t, CandidateNode> candidates_;
  std::uint32_t next_candidate_ = 1;
  std::uint64_t version_ = 0;
  std::uint64_t episodes_ = 0;
  std::vector<GraphEvent> events_;
  std::vector<TransitionKey> keys_;  // scratch
};

/// Edges of a deterministic automaton over transition keys, state 0 initial.
using KeyedEdges = std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint32_t>;

/// True when a bijection between the safe nodes and the automaton states maps
/// the root to state 0 and the safe-to-safe edges exactly onto `edges`.
bool transition_isomorphic(const HypothesisGraph& graph, std::size_t num_states, const KeyedEdges& edges);

}  // namespace nmrl::learner
