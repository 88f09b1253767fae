#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmrl/types.hpp"

namespace nmrl::envs {

enum class DomainKind {
  RotatingMab,
  ResetRotatingMab,
  MalfunctionMab,
  CheatMab,
  RotatingMaze,
  FlickeringGrid,
  EnemyCorridor,
};

std::string_view to_string(DomainKind kind);
/// Throws std::invalid_argument for unknown names.
DomainKind parse_domain(std::string_view name);

struct GridCell {
  std::int32_t x = 0;
  std::int32_t y = 0;
  auto operator<=>(const GridCell&) const = default;
};

struct EnvConfig {
  DomainKind domain = DomainKind::RotatingMab;
  std::uint32_t k = 2;
  std::uint32_t horizon = 10;
  std::vector<double> arm_probabilities;  // MAB domains
  double reward = 100.0;
  std::uint32_t grid_width = 4;           // grid domains
  std::uint32_t grid_height = 4;
  GridCell start{0, 0};
  GridCell goal{2, 3};
  double flicker_probability = 0.2;       // Flickering Grid
  double success_probability = 0.9;       // Rotating Maze
  double enemy_probability_first_half = 0.8;   // Enemy Corridor
  double enemy_probability_second_half = 0.2;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range for the domain.
  void validate() const;
  /// Reference domain parameters for (domain, k).
  static EnvConfig defaults(DomainKind domain, std::uint32_t k);
  bool operator==(const EnvConfig&) const = default;
};

/// Hidden simulator state. Domains use the slots they need.
struct Latent {
  std::array<std::int32_t, 4> v{};
  bool terminated = false;
  auto operator<=>(const Latent&) const = default;
};

struct Transition {
  double probability = 0.0;
  ObservationId observation;
  RewardId reward;
  Latent next;
};

/// Generative definition of a domain: the exact next-step distribution of
/// every latent state. Both the simulator and the exact tabulation draw from
/// `transitions`, so they agree by construction.
class DomainModel {
 public:
  virtual ~DomainModel() = default;

  [[nodiscard]] const Signature& signature() const { return signature_; }
  [[nodiscard]] std::uint32_t horizon() const { return config_.horizon; }
  [[nodiscard]] const EnvConfig& config() const { return config_; }

  [[nodiscard]] virtual Latent initial() const = 0;
  /// Appends the positive-probability transitions of `state` under `a`.
  /// A transition whose `next.terminated` is set ends the episode after its
  /// (o, r) is emitted.
  virtual void transitions(const Latent& state, ActionId a, std::vector<Transition>& out) const = 0;
  /// Ground-truth abstract state: a deterministic function of the history
  /// that makes the process Markov.
  [[nodiscard]] virtual std::int64_t label(const Latent& state) const = 0;

 protected:
  DomainModel(EnvConfig config, Signature signature)
      : config_(std::move(config)), signature_(std::move(signature)) {}

 private:
  EnvConfig config_;
  Signature signature_;
};

std::unique_ptr<DomainModel> make_domain(const EnvConfig& config);

/// Label given to the latent reached after an absorbing termination.
inline constexpr std::int64_t kTerminatedLabel = -1;

}  // namespace nmrl::envs
