#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nmrl/harness/config.hpp"
#include "nmrl/orchestrator/run.hpp"

namespace nmrl::harness {

struct EvalRecord {
  std::uint64_t seed = 0;
  std::uint64_t episode = 0;
  double avg_reward_per_step = 0.0;
  std::size_t safe_states = 0;
  std::size_t candidates = 0;
  std::uint64_t version = 0;
  double wall_time_s = 0.0;
};

inline constexpr const char* kCsvHeader = "seed,episode,avg_reward_per_step,safe_states,candidates,version,wall_time_s";

/// One CSV line (no newline); reals carry 6 fractional digits.
std::string format_record(const EvalRecord& record);

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path graph;
  std::filesystem::path stages;
  std::filesystem::path trace;
};
OutputPaths output_paths(const std::filesystem::path& dir, std::uint64_t seed);

struct TrainOptions {
  bool force = false;
  std::optional<std::uint64_t> only_seed;
  std::ostream* log = nullptr;  // progress lines, if set
  unsigned jobs = 1;            // seeds trained concurrently; 0 = hardware threads
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::vector<EvalRecord> records;
  orchestrator::StageLog stages;
  std::vector<std::string> violations;  // invariant monitor and stage accounting
  std::optional<std::string> failure;
  OutputPaths paths;
};

/// Runs every configured seed (or only `options.only_seed`) on up to
/// `options.jobs` worker threads, writing per seed
/// a CSV of evaluation records (appended as they are produced), the final
/// hypothesis graph, the stage log and the evaluation trace. Throws
/// std::runtime_error if an output file exists and `force` is off. A seed
/// whose run throws is stopped and the error recorded in its stage log.
std::vector<SeedOutcome> train(const RunConfig& config, const TrainOptions& options = {});

struct VerifyItem {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  [[nodiscard]] bool passed() const;
};

/// Exhaustive checks: abstraction automata of the RDP fixtures, belief
/// classes of the POMDP fixtures, identity marginalization, and Markovness of
/// every domain's ground-truth labels at horizon 4.
VerifyReport verify();
void print_report(const VerifyReport& report, std::ostream& out);

/// Result of checking that a domain's ground-truth labels induce an MDP.
struct MarkovCheck {
  bool markov = false;
  std::size_t histories = 0;
  std::size_t states = 0;
  std::string message;
};
MarkovCheck check_ground_truth(const envs::EnvConfig& config, std::size_t horizon);

struct TracePoint {
  std::uint64_t seed = 0;
  std::uint64_t episode = 0;
  std::uint64_t safe_steps = 0;
  std::uint64_t non_safe_steps = 0;
  double avg_reward_per_step = 0.0;
};

/// Reads a trace file (one JSON object per line).
std::vector<TracePoint> read_trace(const std::filesystem::path& path);

/// Spearman rank correlation with average ranks for ties; nullopt when either
/// side is constant or fewer than two points are given.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SafeVsCandidate {
  std::uint64_t seed = 0;
  std::vector<TracePoint> points;
  std::optional<double> trend;  // Spearman(episode, non-safe steps)
};

std::vector<SafeVsCandidate> safe_vs_candidate_report(const std::vector<TracePoint>& trace);
void print_report(const std::vector<SafeVsCandidate>& report, std::ostream& out);

}  // namespace nmrl::harness
