#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "nmrl/envs/analysis.hpp"
#include "nmrl/envs/environment.hpp"
#include "nmrl/rng.hpp"

namespace nmrl::testing {

namespace {

struct LatentValues {
  const envs::DomainModel& model;
  std::map<std::pair<envs::Latent, std::size_t>, double> memo;

  double value(const envs::Latent& x, std::size_t steps) {
    if (steps == 0 || x.terminated) return 0.0;
    const auto key = std::make_pair(x, steps);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    double best = 0.0;
    const auto& sig = model.signature();
    for (std::uint32_t a = 0; a < sig.num_actions; ++a) {
      std::vector<envs::Transition> out;
      model.transitions(x, ActionId{a}, out);
      double q = 0.0;
      for (const auto& t : out) q += t.probability * (sig.reward_value(t.reward) + value(t.next, steps - 1));
      best = a == 0 ? q : std::max(best, q);
    }
    memo.emplace(key, best);
    return best;
  }
};

}  // namespace

Signature parity_signature() { return Signature{2, 2, {0.0, 1.0}, std::nullopt}; }

std::size_t parity_of(HistoryView h) {
  std::size_t ones = 0;
  for (const auto& s : h) ones += s.observation.index;
  return ones % 2;
}

TabularNmdp::Generator parity_generator() {
  return [](HistoryView h, ActionId a) {
    const double p1 = parity_of(h) == 1 ? 0.8 : 0.2;
    DynamicsRow row;
    const RewardId paid_for_one{a.index == 0 ? 1u : 0u};
    const RewardId paid_for_zero{a.index == 0 ? 0u : 1u};
    row.outcomes.push_back(Outcome{ObservationId{0}, paid_for_zero, 1.0 - p1});
    row.outcomes.push_back(Outcome{ObservationId{1}, paid_for_one, p1});
    row.normalize_layout();
    return row;
  };
}

double latent_optimum_per_step(const envs::EnvConfig& config, std::size_t steps) {
  const auto model = envs::make_domain(config);
  LatentValues values{*model, {}};
  return values.value(model->initial(), steps) / static_cast<double>(steps);
}

UniformLearning learn_uniform(const envs::EnvConfig& config, const learner::LearnerParams& params,
                              std::uint64_t seed, std::uint64_t episodes, std::uint64_t check_every) {
  std::shared_ptr<const envs::DomainModel> model = envs::make_domain(config);
  envs::Environment env(model);
  UniformLearning result;
  result.graph = std::make_unique<learner::HypothesisGraph>(model->signature(), params);
  const auto& codec = result.graph->codec();
  const auto reference = envs::reference_automaton(
      *model, [&](const StepSymbol& s) { return static_cast<std::uint64_t>(codec.encode(s)); }, config.horizon);
  result.reference_states = reference.num_states();
  History episode;
  for (std::uint64_t e = 0; e < episodes; ++e) {
    env.reset(make_stream(seed, StreamPurpose::TrainEnvironment, e));
    Rng policy = make_stream(seed, StreamPurpose::TrainPolicy, e);
    episode.clear();
    while (!env.done()) {
      const ActionId a{static_cast<std::uint32_t>(policy.below(model->signature().num_actions))};
      const auto out = env.step(a);
      episode.push_back(StepSymbol{a, out.observation, out.reward});
    }
    result.graph->consume(episode);
    if ((e + 1) % check_every == 0 && !result.first_isomorphic &&
        learner::transition_isomorphic(*result.graph, reference.num_states(), reference.edges)) {
      result.first_isomorphic = e + 1;
    }
  }
  result.isomorphic_at_end = learner::transition_isomorphic(*result.graph, reference.num_states(), reference.edges);
  return result;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("nmrl-" + tag + "-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace nmrl::testing
