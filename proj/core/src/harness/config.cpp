#include "nmrl/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nmrl::harness {

namespace {

using nlohmann::json;
using envs::DomainKind;

struct AbstractionRow {
  std::uint32_t k;
  double mu;
  std::uint32_t delay;
  std::uint32_t n_max;
  learner::ExplorationPolicy exploration;
};

constexpr auto kUniform = learner::ExplorationPolicy::Uniform;
constexpr auto kSingle = learner::ExplorationPolicy::SingleRandomAction;

// Reference rows. Malfunction k=3 has two candidate rows; the first (uniform) is used.
const std::vector<AbstractionRow> kRotating{
    {2, 0.35, 1, 10, kUniform}, {3, 0.23, 1, 10, kUniform}, {4, 0.175, 1, 10, kUniform},
    {5, 0.14, 1, 10, kUniform}, {6, 0.116, 1, 10, kUniform}};
const std::vector<AbstractionRow> kMalfunction{{3, 0.079, 4, 10, kUniform}, {5, 0.2047, 6, 10, kSingle}};
const std::vector<AbstractionRow> kCheat{{3, 0.049, 4, 10, kUniform}, {4, 0.0254, 5, 10, kUniform}};
const std::vector<AbstractionRow> kMaze{{1, 0.224, 1, 100, kSingle}, {2, 0.2, 2, 150, kSingle}, {3, 0.18, 3, 200, kSingle}};

const AbstractionRow& nearest(const std::vector<AbstractionRow>& rows, std::uint32_t k) {
  return *std::min_element(rows.begin(), rows.end(), [k](const AbstractionRow& a, const AbstractionRow& b) {
    const auto da = a.k > k ? a.k - k : k - a.k;
    const auto db = b.k > k ? b.k - k : k - b.k;
    return da < db;
  });
}

void set_row(RunConfig& c, const AbstractionRow& row) {
  c.learner.mu = row.mu;
  c.learner.delay = row.delay;
  c.learner.n_max = row.n_max;
  c.learner.exploration = row.exploration;
}

void reject_unknown(const json& section, std::string_view name, std::initializer_list<std::string_view> allowed) {
  if (!section.is_object()) throw std::invalid_argument("config section '" + std::string(name) + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument("unknown key '" + key + "' in config section '" + std::string(name) + "'");
    }
  }
}

template <typename T>
void read(const json& section, const char* key, T& out) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
  }
}

void read_cell(const json& section, const char* key, envs::GridCell& out) {
  if (!section.contains(key)) return;
  const auto& v = section.at(key);
  if (!v.is_array() || v.size() != 2) throw std::invalid_argument(std::string("config key '") + key + "' must be [x, y]");
  out.x = v[0].get<std::int32_t>();
  out.y = v[1].get<std::int32_t>();
}

std::uint32_t default_k(DomainKind domain) {
  switch (domain) {
    case DomainKind::RotatingMab:
    case DomainKind::ResetRotatingMab:
      return 2;
    case DomainKind::MalfunctionMab:
    case DomainKind::CheatMab:
      return 3;
    case DomainKind::EnemyCorridor:
      return 4;
    case DomainKind::RotatingMaze:
    case DomainKind::FlickeringGrid:
      return 1;
  }
  return 1;
}

}  // namespace

RunConfig RunConfig::defaults(DomainKind domain, std::uint32_t k) {
  RunConfig c;
  c.env = envs::EnvConfig::defaults(domain, k);
  switch (domain) {
    case DomainKind::RotatingMab:
    case DomainKind::ResetRotatingMab: {
      const auto* row = &nearest(kRotating, k);
      set_row(c, *row);
      if (row->k != k) c.learner.mu = 0.7 / k;
      break;
    }
    case DomainKind::MalfunctionMab:
      set_row(c, nearest(kMalfunction, k));
      break;
    case DomainKind::CheatMab:
      set_row(c, nearest(kCheat, k));
      break;
    case DomainKind::RotatingMaze:
      set_row(c, nearest(kMaze, k));
      c.agent.gamma = 0.9375;
      c.agent.v_max = 100.0;
      break;
    case DomainKind::FlickeringGrid:
      set_row(c, AbstractionRow{k, 0.2, 1, c.env.grid_width * c.env.grid_height + 4, kUniform});
      c.agent.gamma = 0.9375;
      c.agent.v_max = 100.0;
      break;
    case DomainKind::EnemyCorridor:
      set_row(c, AbstractionRow{k, 0.3, 1, 2 * k + 2, kUniform});
      c.agent.v_max = c.env.reward / (1.0 - c.agent.gamma);
      break;
  }
  return c;
}

void RunConfig::validate() const {
  env.validate();
  learner::LearnerParams l = learner;
  l.delta_a = schedule.delta / 2.0;
  l.validate();
  agent.validate();
  if (schedule.training_episodes < 1) throw std::invalid_argument("schedule: training_episodes must be at least 1");
  if (schedule.eval_every < 1) throw std::invalid_argument("schedule: eval_every must be at least 1");
  if (schedule.eval_episodes < 1) throw std::invalid_argument("schedule: eval_episodes must be at least 1");
  if (schedule.seeds.empty()) throw std::invalid_argument("schedule: seeds must not be empty");
  if (std::set<std::uint64_t>(schedule.seeds.begin(), schedule.seeds.end()).size() != schedule.seeds.size()) {
    throw std::invalid_argument("schedule: seeds must be distinct");
  }
  if (!(schedule.delta > 0.0 && schedule.delta < 1.0)) throw std::invalid_argument("schedule: delta must lie in (0, 1)");
  if (!(schedule.epsilon > 0.0)) throw std::invalid_argument("schedule: epsilon must be positive");
  if (schedule.output_dir.empty()) throw std::invalid_argument("schedule: output_dir must not be empty");
}

orchestrator::RunSetup RunConfig::setup(std::uint64_t seed) const {
  const auto split = orchestrator::split_confidence(schedule.delta, learner.n_max);
  orchestrator::RunSetup s;
  s.env = env;
  s.env.seed = seed;
  s.learner = learner;
  s.learner.delta_a = split.learner;
  s.agent = agent;
  s.agent.delta_m = split.agent;
  s.mode = mode;
  s.seed = seed;
  return s;
}

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "top level", {"env", "learner", "agent", "schedule"});
  const json env = doc.value("env", json::object());
  const json learner = doc.value("learner", json::object());
  const json agent = doc.value("agent", json::object());
  const json schedule = doc.value("schedule", json::object());
  reject_unknown(env, "env",
                 {"domain", "k", "horizon", "arm_probabilities", "reward", "grid_width", "grid_height", "start", "goal",
                  "flicker_probability", "success_probability", "enemy_probability_first_half",
                  "enemy_probability_second_half"});
  reject_unknown(learner, "learner", {"mu", "delay", "n_max", "observation_only", "exploration"});
  reject_unknown(agent, "agent", {"mode", "m0", "gamma", "v_max", "vi_tolerance", "max_sweeps"});
  reject_unknown(schedule, "schedule",
                 {"training_episodes", "eval_every", "eval_episodes", "seeds", "delta", "epsilon", "output_dir",
                  "record_wall_time"});

  if (!env.contains("domain")) throw std::invalid_argument("config: env.domain is required");
  const DomainKind domain = envs::parse_domain(env.at("domain").get<std::string>());
  std::uint32_t k = default_k(domain);
  read(env, "k", k);

  // Grid size changes the flickering-grid defaults, so it is applied first.
  RunConfig c = RunConfig::defaults(domain, k);
  if (domain == DomainKind::FlickeringGrid && (env.contains("grid_width") || env.contains("grid_height"))) {
    envs::EnvConfig sized = c.env;
    read(env, "grid_width", sized.grid_width);
    read(env, "grid_height", sized.grid_height);
    c.learner.n_max = sized.grid_width * sized.grid_height + 4;
  }

  read(env, "horizon", c.env.horizon);
  read(env, "arm_probabilities", c.env.arm_probabilities);
  read(env, "reward", c.env.reward);
  read(env, "grid_width", c.env.grid_width);
  read(env, "grid_height", c.env.grid_height);
  read_cell(env, "start", c.env.start);
  read_cell(env, "goal", c.env.goal);
  read(env, "flicker_probability", c.env.flicker_probability);
  read(env, "success_probability", c.env.success_probability);
  read(env, "enemy_probability_first_half", c.env.enemy_probability_first_half);
  read(env, "enemy_probability_second_half", c.env.enemy_probability_second_half);

  read(learner, "mu", c.learner.mu);
  read(learner, "delay", c.learner.delay);
  read(learner, "n_max", c.learner.n_max);
  read(learner, "observation_only", c.learner.observation_only);
  if (learner.contains("exploration")) c.learner.exploration = learner::parse_exploration(learner.at("exploration").get<std::string>());

  if (agent.contains("mode")) c.mode = orchestrator::parse_mode(agent.at("mode").get<std::string>());
  read(agent, "m0", c.agent.m0);
  read(agent, "gamma", c.agent.gamma);
  read(agent, "v_max", c.agent.v_max);
  read(agent, "vi_tolerance", c.agent.vi_tolerance);
  read(agent, "max_sweeps", c.agent.max_sweeps);

  read(schedule, "training_episodes", c.schedule.training_episodes);
  read(schedule, "eval_every", c.schedule.eval_every);
  read(schedule, "eval_episodes", c.schedule.eval_episodes);
  read(schedule, "seeds", c.schedule.seeds);
  read(schedule, "delta", c.schedule.delta);
  read(schedule, "epsilon", c.schedule.epsilon);
  read(schedule, "output_dir", c.schedule.output_dir);
  read(schedule, "record_wall_time", c.schedule.record_wall_time);

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
  json doc;
  doc["env"] = {
      {"domain", std::string(envs::to_string(c.env.domain))},
      {"k", c.env.k},
      {"horizon", c.env.horizon},
      {"arm_probabilities", c.env.arm_probabilities},
      {"reward", c.env.reward},
      {"grid_width", c.env.grid_width},
      {"grid_height", c.env.grid_height},
      {"start", {c.env.start.x, c.env.start.y}},
      {"goal", {c.env.goal.x, c.env.goal.y}},
      {"flicker_probability", c.env.flicker_probability},
      {"success_probability", c.env.success_probability},
      {"enemy_probability_first_half", c.env.enemy_probability_first_half},
      {"enemy_probability_second_half", c.env.enemy_probability_second_half},
  };
  doc["learner"] = {
      {"mu", c.learner.mu},
      {"delay", c.learner.delay},
      {"n_max", c.learner.n_max},
      {"observation_only", c.learner.observation_only},
      {"exploration", std::string(learner::to_string(c.learner.exploration))},
  };
  doc["agent"] = {
      {"mode", std::string(orchestrator::to_string(c.mode))},
      {"m0", c.agent.m0},
      {"gamma", c.agent.gamma},
      {"v_max", c.agent.v_max},
      {"vi_tolerance", c.agent.vi_tolerance},
      {"max_sweeps", c.agent.max_sweeps},
  };
  doc["schedule"] = {
      {"training_episodes", c.schedule.training_episodes},
      {"eval_every", c.schedule.eval_every},
      {"eval_episodes", c.schedule.eval_episodes},
      {"seeds", c.schedule.seeds},
      {"delta", c.schedule.delta},
      {"epsilon", c.schedule.epsilon},
      {"output_dir", c.schedule.output_dir},
      {"record_wall_time", c.schedule.record_wall_time},
  };
  return doc.dump(2) + "\n";
}

Preset parse_preset(std::string_view name) {
  if (name == "desk") return Preset::Desk;
  if (name == "paper") return Preset::Paper;
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

void apply_preset(RunConfig& config, Preset preset) {
  if (preset == Preset::Paper) {
    config.schedule.training_episodes = kPaperEpisodes;
    return;
  }
  config.schedule.training_episodes = std::min(config.schedule.training_episodes, kDeskEpisodes);
  if (config.env.domain == DomainKind::FlickeringGrid) {
    const std::uint32_t default_n = config.env.grid_width * config.env.grid_height + 4;
    config.env.grid_width = 4;
    config.env.grid_height = 4;
    config.env.goal = {3, 3};
    if (config.learner.n_max == default_n) config.learner.n_max = 4 * 4 + 4;
  }
}

}  // namespace nmrl::harness
