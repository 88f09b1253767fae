#include "nmrl/learner/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "nmrl/errors.hpp"

namespace nmrl::learner {

std::string_view to_string(ExplorationPolicy policy) {
  return policy == ExplorationPolicy::Uniform ? "uniform" : "single_random_action";
}

ExplorationPolicy parse_exploration(std::string_view name) {
  if (name == "uniform") return ExplorationPolicy::Uniform;
  if (name == "single_random_action") return ExplorationPolicy::SingleRandomAction;
  throw std::invalid_argument("unknown exploration policy: " + std::string(name));
}

void LearnerParams::validate() const {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("learner: mu must lie in (0, 1]");
  if (delay < 1) throw std::invalid_argument("learner: delay must be at least 1");
  if (n_max < 1) throw std::invalid_argument("learner: n_max must be at least 1");
  if (!(delta_a > 0.0 && delta_a < 1.0)) throw std::invalid_argument("learner: delta_a must lie in (0, 1)");
}

KeyCodec::KeyCodec(const Signature& signature, bool observation_only)
    : num_observations_(signature.num_observations),
      num_rewards_(signature.num_rewards()),
      alphabet_(observation_only ? signature.num_observations
                                 : signature.num_actions * signature.num_observations * signature.num_rewards()),
      observation_only_(observation_only) {}

StepSymbol KeyCodec::decode(TransitionKey key) const {
  if (observation_only_) return StepSymbol{ActionId{0}, ObservationId{key}, RewardId{0}};
  const std::uint32_t r = key % num_rewards_;
  const std::uint32_t ao = key / num_rewards_;
  return StepSymbol{ActionId{ao / num_observations_}, ObservationId{ao % num_observations_}, RewardId{r}};
}

TransitionKey transition_key(const StepSymbol& symbol, const Signature& signature, bool observation_only) {
  return KeyCodec(signature, observation_only).encode(symbol);
}

void FutureStats::add(std::span<const TransitionKey> keys, bool ended, TransitionKey terminal) {
  ++samples_;
  Prefix prefix;
  prefix.reserve(keys.size() + 1);
  for (TransitionKey k : keys) {
    prefix.push_back(k);
    ++counts_[prefix];
  }
  if (ended) {
    prefix.push_back(terminal);
    ++counts_[prefix];
  }
}

std::uint64_t FutureStats::count(const Prefix& prefix) const {
  const auto it = counts_.find(prefix);
  return it == counts_.end() ? 0 : it->second;
}

double FutureStats::frequency(const Prefix& prefix) const {
  return samples_ == 0 ? 0.0 : static_cast<double>(count(prefix)) / static_cast<double>(samples_);
}

double prefix_linf_distance(const FutureStats& a, const FutureStats& b) {
  if (a.samples() == 0 || b.samples() == 0) throw std::invalid_argument("prefix distance needs samples on both sides");
  const double na = static_cast<double>(a.samples());
  const double nb = static_cast<double>(b.samples());
  auto ia = a.prefix_counts().begin();
  auto ib = b.prefix_counts().begin();
  const auto ea = a.prefix_counts().end();
  const auto eb = b.prefix_counts().end();
  double worst = 0.0;
  while (ia != ea || ib != eb) {
    double fa = 0.0;
    double fb = 0.0;
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      fa = static_cast<double>(ia->second) / na;
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      fb = static_cast<double>(ib->second) / nb;
      ++ib;
    } else {
      fa = static_cast<double>(ia->second) / na;
      fb = static_cast<double>(ib->second) / nb;
      ++ia;
      ++ib;
    }
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

double future_prefix_count(std::uint32_t alphabet, std::uint32_t delay) {
  double plain = 0.0;
  double power = 1.0;
  double terminated = 0.0;
  for (std::uint32_t l = 1; l <= delay; ++l) {
    terminated += power;  // l-1 keys, then the terminal key
    power *= alphabet;
    plain += power;
  }
  return plain + terminated;
}

double test_confidence(const LearnerParams& params, std::uint32_t alphabet) {
  const double n = params.n_max;
  return params.delta_a / (2.0 * n * (n * alphabet + 1.0));
}

std::uint64_t sample_size_threshold(double mu, double delta_test, double prefix_count) {
  const double value = 16.0 / (mu * mu) * std::log(2.0 * (prefix_count + 1.0) / delta_test);
  // Guard against the product landing a rounding error above an integer.
  const double rounded = std::round(value);
  return static_cast<std::uint64_t>(std::abs(value - rounded) < 1e-9 ? rounded : std::ceil(value));
}

std::uint64_t sample_size_threshold(const LearnerParams& params, std::uint32_t alphabet) {
  return sample_size_threshold(params.mu, test_confidence(params, alphabet),
                               future_prefix_count(alphabet, params.delay));
}

HypothesisGraph::HypothesisGraph(const Signature& signature, LearnerParams params)
    : codec_(signature, params.observation_only), params_(params) {
  signature.validate();
  params_.validate();
  n_min_ = sample_size_threshold(params_, codec_.alphabet_size());
  candidates_.emplace(0, CandidateNode{0, std::nullopt, 0, {}});
}

std::optional<AbstractState> HypothesisGraph::lookup(HistoryView history) const {
  if (safe_.empty()) {
    if (history.empty()) return AbstractState{0, NodeKind::Candidate};
    return std::nullopt;
  }
  AbstractState at{0, NodeKind::Safe};
  for (const auto& s : history) {
    if (!at.safe()) return std::nullopt;
    const auto& edge = safe_[at.id].out[codec_.encode(s)];
    if (!edge) return std::nullopt;
    at = *edge;
  }
  return at;
}

std::optional<AbstractState> HypothesisGraph::next(AbstractState from, HistoryView /*history*/,
                                                   const StepSymbol& symbol) const {
  if (!from.safe() || from.id >= safe_.size()) return std::nullopt;
  return safe_[from.id].out[codec_.encode(symbol)];
}

void HypothesisGraph::consume(HistoryView episode) {
  ++episodes_;
  std::uint32_t candidate = 0;
  std::size_t start = 0;  // first symbol of the future
  if (!safe_.empty()) {
    std::uint32_t at = 0;
    std::size_t i = 0;
    for (; i < episode.size(); ++i) {
      const TransitionKey key = codec_.encode(episode[i]);
      auto& edge = safe_[at].out[key];
      if (edge && edge->safe()) {
        at = edge->id;
        continue;
      }
      if (!edge) {
        candidate = next_candidate_++;
        candidates_.emplace(candidate, CandidateNode{candidate, at, key, {}});
        edge = AbstractState{candidate, NodeKind::Candidate};
      } else {
        candidate = edge->id;
      }
      break;
    }
    if (i == episode.size()) return;  // never left the safe region
    start = i + 1;
  }

  const std::size_t remaining = episode.size() - start;
  const std::size_t window = std::min<std::size_t>(remaining, params_.delay);
  keys_.clear();
  for (std::size_t j = 0; j < window; ++j) keys_.push_back(codec_.encode(episode[start + j]));
  auto& node = candidates_.at(candidate);
  node.stats.add(keys_, remaining < params_.delay, codec_.terminal_key());
  if (node.stats.samples() < n_min_) return;
  const Decision decision = decide(candidate);
  if (decision.kind != Decision::Kind::Wait) apply(candidate, decision);
}

Decision HypothesisGraph::decide(std::uint32_t candidate) const {
  const auto& c = candidates_.at(candidate);
  if (c.stats.samples() < n_min_) return Decision{};
  for (const auto& s : safe_) {
    if (s.frozen.samples() < n_min_) return Decision{};
  }
  std::optional<std::uint32_t> best;
  double best_distance = 0.0;
  for (const auto& s : safe_) {
    const double d = prefix_linf_distance(c.stats, s.frozen);
    if (!best || d < best_distance) {
      best = s.id;
      best_distance = d;
    }
  }
  if (best && best_distance <= params_.mu / 2.0) return Decision{Decision::Kind::Merge, *best};
  return Decision{Decision::Kind::Promote, 0};
}

void HypothesisGraph::apply(std::uint32_t candidate, const Decision& decision) {
  auto node = candidates_.extract(candidate);
  CandidateNode& c = node.mapped();
  GraphEvent event;
  event.candidate = candidate;
  event.parent = c.parent;
  event.key = c.key;
  event.samples = c.stats.samples();
  event.episode = episodes_;
  std::uint32_t target = decision.target;
  if (decision.kind == Decision::Kind::Promote) {
    if (safe_.size() >= params_.n_max) {
      candidates_.insert(std::move(node));
      throw StateBudgetExhaustedError("promotion would exceed n_max = " + std::to_string(params_.n_max) +
                                      " safe states");
    }
    target = static_cast<std::uint32_t>(safe_.size());
    safe_.push_back(SafeNode{target, std::vector<std::optional<AbstractState>>(codec_.alphabet_size()),
                             std::move(c.stats)});
    event.kind = EventKind::Promote;
  } else {
    if (!c.parent) throw std::logic_error("the root candidate cannot be merged");
    event.kind = EventKind::Merge;
  }
  if (c.parent) safe_[*c.parent].out[c.key] = AbstractState{target, NodeKind::Safe};
  event.safe = target;
  event.version = ++version_;
  events_.push_back(event);
}

std::uint64_t HypothesisGraph::event_bound() const {
  return static_cast<std::uint64_t>(params_.n_max) * (codec_.alphabet_size() + 1ULL) + 1ULL;
}

std::string HypothesisGraph::dump() const {
  std::ostringstream out;
  out << "# version " << version_ << " safe " << safe_.size() << " candidates " << candidates_.size() << " n_min "
      << n_min_ << " episodes " << episodes_ << '\n';
  for (const auto& s : safe_) {
    out << "safe " << s.id << " N=" << s.frozen.samples();
    for (std::size_t k = 0; k < s.out.size(); ++k) {
      if (!s.out[k]) continue;
      out << ' ' << k << "->" << (s.out[k]->safe() ? 'S' : 'C') << s.out[k]->id;
    }
    out << '\n';
  }
  for (const auto& [id, c] : candidates_) {
    out << "candidate " << id << " parent=";
    if (c.parent) {
      out << *c.parent;
    } else {
      out << '-';
    }
    out << " key=" << c.key << " N=" << c.stats.samples() << '\n';
  }
  return out.str();
}

bool transition_isomorphic(const HypothesisGraph& graph, std::size_t num_states, const KeyedEdges& edges) {
  const auto& safe = graph.safe_nodes();
  if (safe.size() != num_states || num_states == 0) return false;
  std::vector<std::map<std::uint64_t, std::uint32_t>> expected(num_states);
  for (const auto& [from_key, to] : edges) {
    if (from_key.first >= num_states || to >= num_states) return false;
    expected[from_key.first].emplace(from_key.second, to);
  }
  std::vector<std::optional<std::uint32_t>> image(num_states);    // safe id -> state
  std::vector<std::optional<std::uint32_t>> preimage(num_states); // state -> safe id
  auto bind = [&](std::uint32_t node, std::uint32_t state) {
    if (image[node] || preimage[state]) return image[node] == state && preimage[state] == node;
    image[node] = state;
    preimage[state] = node;
    return true;
  };
  if (!bind(0, 0)) return false;
  std::deque<std::uint32_t> queue{0};
  std::vector<bool> visited(num_states, false);
  visited[0] = true;
  while (!queue.empty()) {
    const std::uint32_t node = queue.front();
    queue.pop_front();
    std::map<std::uint64_t, std::uint32_t> actual;
    for (std::size_t k = 0; k < safe[node].out.size(); ++k) {
      const auto& e = safe[node].out[k];
      if (e && e->safe()) actual.emplace(k, e->id);
    }
    const auto& want = expected[*image[node]];
    if (actual.size() != want.size()) return false;
    for (const auto& [key, target] : actual) {
      const auto it = want.find(key);
      if (it == want.end() || !bind(target, it->second)) return false;
      if (!visited[target]) {
        visited[target] = true;
        queue.push_back(target);
      }
    }
  }
  return std::all_of(visited.begin(), visited.end(), [](bool v) { return v; });
}

}  // namespace nmrl::learner
