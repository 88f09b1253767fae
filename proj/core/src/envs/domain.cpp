#include "nmrl/envs/domain.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace nmrl::envs {

namespace {

struct NamedDomain {
  DomainKind kind;
  std::string_view name;
};

constexpr std::array<NamedDomain, 7> kDomainNames{{
    {DomainKind::RotatingMab, "rotating_mab"},
    {DomainKind::ResetRotatingMab, "reset_rotating_mab"},
    {DomainKind::MalfunctionMab, "malfunction_mab"},
    {DomainKind::CheatMab, "cheat_mab"},
    {DomainKind::RotatingMaze, "rotating_maze"},
    {DomainKind::FlickeringGrid, "flickering_grid"},
    {DomainKind::EnemyCorridor, "enemy_corridor"},
}};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid env config: " + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

bool in_grid(const EnvConfig& c, GridCell cell) {
  return cell.x >= 0 && cell.y >= 0 && cell.x < static_cast<std::int32_t>(c.grid_width) &&
         cell.y < static_cast<std::int32_t>(c.grid_height);
}

Signature bandit_signature(std::uint32_t arms, std::uint32_t observations, double reward) {
  Signature sig;
  sig.num_actions = arms;
  sig.num_observations = observations;
  sig.rewards = {0.0, reward};
  return sig;
}

constexpr RewardId kNoReward{0};
constexpr RewardId kReward{1};

// Appends the success/failure pair of a Bernoulli reward. The observation is
// chosen by the caller for each branch.
void bernoulli_branches(std::vector<Transition>& out, double p, ObservationId success_obs, const Latent& success,
                        ObservationId failure_obs, const Latent& failure) {
  if (p > 0.0) out.push_back(Transition{p, success_obs, kReward, success});
  if (p < 1.0) out.push_back(Transition{1.0 - p, failure_obs, kNoReward, failure});
}

// Rotating and Reset-Rotating MAB. v[0] = phase. Observation = rewarded bit.
class RotatingMab final : public DomainModel {
 public:
  RotatingMab(const EnvConfig& c, bool reset_on_failure)
      : DomainModel(c, bandit_signature(c.k, 2, c.reward)), reset_(reset_on_failure) {}

  Latent initial() const override { return Latent{}; }

  void transitions(const Latent& s, ActionId a, std::vector<Transition>& out) const override {
    const std::uint32_t k = config().k;
    const std::uint32_t phase = static_cast<std::uint32_t>(s.v[0]);
    const double p = config().arm_probabilities[(a.index + k - phase) % k];
    Latent success = s;
    success.v[0] = static_cast<std::int32_t>((phase + 1) % k);
    Latent failure = s;
    if (reset_) failure.v[0] = 0;
    bernoulli_branches(out, p, ObservationId{1}, success, ObservationId{0}, failure);
  }

  std::int64_t label(const Latent& s) const override { return s.v[0]; }

 private:
  bool reset_;
};

// v[0] = pulls of arm 0 since the last breakdown. Observation = arm pulled.
class MalfunctionMab final : public DomainModel {
 public:
  explicit MalfunctionMab(const EnvConfig& c) : DomainModel(c, bandit_signature(2, 2, c.reward)) {}

  Latent initial() const override { return Latent{}; }

  void transitions(const Latent& s, ActionId a, std::vector<Transition>& out) const override {
    const ObservationId obs{a.index};
    if (a.index == 1) {
      bernoulli_branches(out, config().arm_probabilities[1], obs, s, obs, s);
      return;
    }
    Latent next = s;
    if (static_cast<std::uint32_t>(s.v[0]) == config().k) {
      next.v[0] = 0;
      out.push_back(Transition{1.0, obs, kNoReward, next});
      return;
    }
    next.v[0] = s.v[0] + 1;
    bernoulli_branches(out, config().arm_probabilities[0], obs, next, obs, next);
  }

  std::int64_t label(const Latent& s) const override { return s.v[0]; }
};

// v[0] = matched length of the cheat sequence 0,1,0,1,... (k once cheated).
// Progress after a mismatch falls back to the longest suffix of the actions
// so far that is a prefix of the sequence.
class CheatMab final : public DomainModel {
 public:
  explicit CheatMab(const EnvConfig& c) : DomainModel(c, bandit_signature(2, 2, c.reward)) {
    const std::uint32_t k = c.k;
    std::vector<std::uint32_t> seq(k);
    for (std::uint32_t i = 0; i < k; ++i) seq[i] = i % 2;
    std::vector<std::uint32_t> fail(k + 1, 0);
    for (std::uint32_t i = 1; i < k; ++i) {
      std::uint32_t j = fail[i];
      while (j > 0 && seq[i] != seq[j]) j = fail[j];
      fail[i + 1] = seq[i] == seq[j] ? j + 1 : 0;
    }
    advance_.assign(k, {0, 0});
    for (std::uint32_t p = 0; p < k; ++p) {
      for (std::uint32_t a = 0; a < 2; ++a) {
        std::uint32_t j = p;
        while (j > 0 && seq[j] != a) j = fail[j];
        advance_[p][a] = seq[j] == a ? j + 1 : 0;
      }
    }
  }

  Latent initial() const override { return Latent{}; }

  void transitions(const Latent& s, ActionId a, std::vector<Transition>& out) const override {
    const ObservationId obs{a.index};
    const std::uint32_t k = config().k;
    const auto progress = static_cast<std::uint32_t>(s.v[0]);
    if (progress == k) {
      out.push_back(Transition{1.0, obs, kReward, s});
      return;
    }
    Latent next = s;
    next.v[0] = static_cast<std::int32_t>(advance_[progress][a.index]);
    bernoulli_branches(out, config().arm_probabilities[a.index], obs, next, obs, next);
  }

  std::int64_t label(const Latent& s) const override { return s.v[0]; }

 private:
  std::vector<std::array<std::uint32_t, 2>> advance_;
};

constexpr std::array<GridCell, 4> kMoves{{{0, -1}, {-1, 0}, {0, 1}, {1, 0}}};  // up, left, down, right

Signature grid_signature(const EnvConfig& c, bool blank) {
  Signature sig;
  sig.num_actions = 4;
  const std::uint32_t cells = c.grid_width * c.grid_height;
  sig.num_observations = cells + (blank ? 1 : 0);
  if (blank) sig.blank_observation = ObservationId{cells};
  sig.rewards = {0.0, c.reward};
  return sig;
}

// v[0] = x, v[1] = y, v[2] = actions taken.
class GridBase : public DomainModel {
 public:
  GridBase(const EnvConfig& c, bool blank) : DomainModel(c, grid_signature(c, blank)) {}

  Latent initial() const override {
    Latent s;
    s.v[0] = config().start.x;
    s.v[1] = config().start.y;
    return s;
  }

 protected:
  Latent moved(const Latent& s, std::uint32_t direction) const {
    Latent next = s;
    const auto w = static_cast<std::int32_t>(config().grid_width);
    const auto h = static_cast<std::int32_t>(config().grid_height);
    next.v[0] = std::clamp(s.v[0] + kMoves[direction].x, 0, w - 1);
    next.v[1] = std::clamp(s.v[1] + kMoves[direction].y, 0, h - 1);
    next.v[2] = s.v[2] + 1;
    next.terminated = next.v[0] == config().goal.x && next.v[1] == config().goal.y;
    return next;
  }
  ObservationId cell(const Latent& s) const {
    return ObservationId{static_cast<std::uint32_t>(s.v[1]) * config().grid_width + static_cast<std::uint32_t>(s.v[0])};
  }
  RewardId reward(const Latent& s) const { return s.terminated ? kReward : kNoReward; }
  std::int64_t cell_label(const Latent& s) const {
    if (s.terminated) return kTerminatedLabel;
    return static_cast<std::int64_t>(cell(s).index);
  }
};

// The action-to-direction map turns one quarter counter-clockwise every k
// actions. The observation is the cell reached.
class RotatingMaze final : public GridBase {
 public:
  explicit RotatingMaze(const EnvConfig& c) : GridBase(c, false) {}

  void transitions(const Latent& s, ActionId a, std::vector<Transition>& out) const override {
    const auto t = static_cast<std::uint32_t>(s.v[2]);
    const std::uint32_t direction = (a.index + t / config().k) % 4;
    const double p = config().success_probability;
    const Latent forward = moved(s, direction);
    const Latent backward = moved(s, (direction + 2) % 4);
    if (forward == backward) {
      out.push_back(Transition{1.0, cell(forward), reward(forward), forward});
      return;
    }
    if (p > 0.0) out.push_back(Transition{p, cell(forward), reward(forward), forward});
    if (p < 1.0) out.push_back(Transition{1.0 - p, cell(backward), reward(backward), backward});
  }

  std::int64_t label(const Latent& s) const override {
    if (s.terminated) return kTerminatedLabel;
    const std::int64_t phase = s.v[2] % static_cast<std::int32_t>(4 * config().k);
    return phase * config().grid_width * config().grid_height + cell_label(s);
  }
};

// Deterministic moves; the cell is observed except for a blank with the
// flicker probability.
class FlickeringGrid final : public GridBase {
 public:
  explicit FlickeringGrid(const EnvConfig& c) : GridBase(c, true) {}

  void transitions(const Latent& s, ActionId a, std::vector<Transition>& out) const override {
    Latent next = moved(s, a.index);
    next.v[2] = 0;  // time is not part of this domain's state
    const double q = config().flicker_probability;
    if (q < 1.0) out.push_back(Transition{1.0 - q, cell(next), reward(next), next});
    if (q > 0.0) out.push_back(Transition{q, *signature().blank_observation, reward(next), next});
  }

  std::int64_t label(const Latent& s) const override { return cell_label(s); }
};

// v[0] = column, v[1] = swap flag. The enemy stands in row 1 of the current
// column with the half-dependent probability, in row 0 while swapped. Every
// hit toggles the swap flag. Observation = column reached.
class EnemyCorridor final : public DomainModel {
 public:
  explicit EnemyCorridor(const EnvConfig& c) : DomainModel(c, corridor_signature(c)) {}

  Latent initial() const override { return Latent{}; }

  void transitions(const Latent& s, ActionId a, std::vector<Transition>& out) const override {
    const auto column = static_cast<std::uint32_t>(s.v[0]);
    const double p_row1 = 2 * column < config().k ? config().enemy_probability_first_half
                                                   : config().enemy_probability_second_half;
    const double p_enemy_row1 = s.v[1] != 0 ? 1.0 - p_row1 : p_row1;
    const double p_hit = a.index == 1 ? p_enemy_row1 : 1.0 - p_enemy_row1;
    Latent next = s;
    next.v[0] = static_cast<std::int32_t>(column + 1);
    next.terminated = column + 1 == config().k;
    Latent hit = next;
    hit.v[1] = 1 - s.v[1];
    const ObservationId obs{column + 1};
    if (p_hit < 1.0) out.push_back(Transition{1.0 - p_hit, obs, kReward, next});
    if (p_hit > 0.0) out.push_back(Transition{p_hit, obs, kNoReward, hit});
  }

  std::int64_t label(const Latent& s) const override {
    if (s.terminated) return kTerminatedLabel;
    return s.v[0] * 2 + s.v[1];
  }

 private:
  static Signature corridor_signature(const EnvConfig& c) { return bandit_signature(2, c.k + 1, c.reward); }
};

}  // namespace

std::string_view to_string(DomainKind kind) {
  for (const auto& d : kDomainNames) {
    if (d.kind == kind) return d.name;
  }
  return "unknown";
}

DomainKind parse_domain(std::string_view name) {
  for (const auto& d : kDomainNames) {
    if (d.name == name) return d.kind;
  }
  throw std::invalid_argument("unknown domain: " + std::string(name));
}

void EnvConfig::validate() const {
  require(horizon >= 1, "horizon must be at least 1");
  require(reward > 0.0, "reward must be positive");
  for (double p : arm_probabilities) require(is_probability(p), "arm probabilities must lie in [0, 1]");
  switch (domain) {
    case DomainKind::RotatingMab:
    case DomainKind::ResetRotatingMab:
      require(k >= 2 && k <= 16, "rotating MAB supports 2 <= k <= 16");
      require(arm_probabilities.size() == k, "rotating MAB needs one probability per arm");
      break;
    case DomainKind::MalfunctionMab:
    case DomainKind::CheatMab:
      require(k >= 1 && k <= 64, "k must lie in [1, 64]");
      require(arm_probabilities.size() == 2, "two-armed bandit needs two probabilities");
      break;
    case DomainKind::RotatingMaze:
    case DomainKind::FlickeringGrid:
      require(domain == DomainKind::FlickeringGrid || (k >= 1 && k <= 64), "maze rotation period must lie in [1, 64]");
      require(grid_width >= 1 && grid_height >= 1 && grid_width * grid_height <= 4096, "grid size out of range");
      require(in_grid(*this, start) && in_grid(*this, goal), "start and goal must lie in the grid");
      require(start != goal, "start and goal must differ");
      require(is_probability(flicker_probability) && is_probability(success_probability),
              "grid probabilities must lie in [0, 1]");
      break;
    case DomainKind::EnemyCorridor:
      require(k >= 1 && k <= 1024, "corridor length must lie in [1, 1024]");
      require(is_probability(enemy_probability_first_half) && is_probability(enemy_probability_second_half),
              "enemy probabilities must lie in [0, 1]");
      break;
  }
}

EnvConfig EnvConfig::defaults(DomainKind domain, std::uint32_t k) {
  EnvConfig c;
  c.domain = domain;
  c.k = k;
  switch (domain) {
    case DomainKind::RotatingMab:
    case DomainKind::ResetRotatingMab:
      c.horizon = 10;
      c.arm_probabilities.assign(k, 0.2);
      if (k > 0) c.arm_probabilities[0] = 0.9;
      break;
    case DomainKind::MalfunctionMab:
      c.horizon = 10;
      c.arm_probabilities = {0.8, 0.2};
      break;
    case DomainKind::CheatMab:
      c.horizon = 10;
      c.arm_probabilities = {0.2, 0.2};
      break;
    case DomainKind::RotatingMaze:
      c.horizon = 15;
      c.grid_width = c.grid_height = 4;
      c.goal = {2, 3};
      break;
    case DomainKind::FlickeringGrid:
      c.horizon = 15;
      c.grid_width = c.grid_height = 8;
      c.goal = {3, 4};
      break;
    case DomainKind::EnemyCorridor:
      c.horizon = 2 * k;
      c.reward = 1.0;
      break;
  }
  return c;
}

std::unique_ptr<DomainModel> make_domain(const EnvConfig& config) {
  config.validate();
  switch (config.domain) {
    case DomainKind::RotatingMab:
      return std::make_unique<RotatingMab>(config, false);
    case DomainKind::ResetRotatingMab:
      return std::make_unique<RotatingMab>(config, true);
    case DomainKind::MalfunctionMab:
      return std::make_unique<MalfunctionMab>(config);
    case DomainKind::CheatMab:
      return std::make_unique<CheatMab>(config);
    case DomainKind::RotatingMaze:
      return std::make_unique<RotatingMaze>(config);
    case DomainKind::FlickeringGrid:
      return std::make_unique<FlickeringGrid>(config);
    case DomainKind::EnemyCorridor:
      return std::make_unique<EnemyCorridor>(config);
  }
  throw std::invalid_argument("unknown domain");
}

}  // namespace nmrl::envs
