#include "nmrl/harness/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "nmrl/envs/analysis.hpp"
#include "nmrl/errors.hpp"
#include "nmrl/induced_mdp.hpp"
#include "nmrl/oracles/suites.hpp"

namespace nmrl::harness {

namespace {

using nlohmann::json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

json stage_json(const orchestrator::StageRecord& s) {
  return json{{"version", s.version},
              {"first_episode", s.first_episode},
              {"safe_states", s.safe_states},
              {"candidates", s.candidates},
              {"resets", s.resets}};
}

// Progress lines from concurrent workers go out whole.
class SharedLog {
 public:
  explicit SharedLog(std::ostream* out) : out_(out) {}
  explicit operator bool() const { return out_ != nullptr; }
  void write(const std::string& line) {
    std::lock_guard lock(mutex_);
    *out_ << line << std::flush;
  }

 private:
  std::ostream* out_;
  std::mutex mutex_;
};

SeedOutcome run_seed(const RunConfig& config, std::uint64_t seed, const OutputPaths& paths, SharedLog& log) {
  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.paths = paths;
  std::ofstream csv = open_output(paths.csv);
  std::ofstream trace = open_output(paths.trace);
  csv << kCsvHeader << '\n' << std::flush;

  const auto started = std::chrono::steady_clock::now();
  std::optional<orchestrator::Run> run;
  try {
    run.emplace(config.setup(seed));
    const auto& sched = config.schedule;
    for (std::uint64_t e = 1; e <= sched.training_episodes; ++e) {
      run->train_episode();
      if (e % sched.eval_every != 0) continue;
      const auto eval = run->evaluate(e / sched.eval_every, sched.eval_episodes);
      EvalRecord record{seed, e, eval.avg_reward_per_step, run->safe_states(), run->candidates(), run->version(), 0.0};
      if (sched.record_wall_time) {
        record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      }
      csv << format_record(record) << '\n' << std::flush;
      trace << json{{"seed", seed},
                    {"episode", e},
                    {"safe_steps", eval.safe_steps},
                    {"non_safe_steps", eval.non_safe_steps},
                    {"avg_reward_per_step", eval.avg_reward_per_step}}
                   .dump()
            << '\n'
            << std::flush;
      outcome.records.push_back(record);
      if (log) {
        std::ostringstream line;
        line << "seed " << seed << " episode " << e << " reward/step " << fixed6(record.avg_reward_per_step)
             << " safe " << record.safe_states << " candidates " << record.candidates << '\n';
        log.write(line.str());
      }
    }
  } catch (const std::exception& e) {
    outcome.failure = e.what();
    if (log) log.write("seed " + std::to_string(seed) + " failed: " + e.what() + "\n");
  }

  std::ofstream stages = open_output(paths.stages);
  if (run) {
    outcome.stages = run->stage_log();
    outcome.violations = run->violations();
    if (const auto* graph = run->graph()) {
      for (auto& v : orchestrator::stage_accounting(outcome.stages, graph->event_bound())) outcome.violations.push_back(v);
      open_output(paths.graph) << graph->dump();
    } else {
      open_output(paths.graph) << "# no hypothesis graph in mode " << orchestrator::to_string(config.mode) << '\n';
    }
  }
  for (const auto& s : outcome.stages.stages) stages << stage_json(s).dump() << '\n';
  for (const auto& v : outcome.violations) stages << json{{"violation", v}}.dump() << '\n';
  if (outcome.failure) stages << json{{"failure", *outcome.failure}, {"episode", run ? run->episodes_trained() : 0}}.dump() << '\n';
  return outcome;
}

}  // namespace

std::string format_record(const EvalRecord& r) {
  return std::to_string(r.seed) + ',' + std::to_string(r.episode) + ',' + fixed6(r.avg_reward_per_step) + ',' +
         std::to_string(r.safe_states) + ',' + std::to_string(r.candidates) + ',' + std::to_string(r.version) + ',' +
         fixed6(r.wall_time_s);
}

OutputPaths output_paths(const std::filesystem::path& dir, std::uint64_t seed) {
  const std::string stem = "seed_" + std::to_string(seed);
  return OutputPaths{dir / (stem + ".csv"), dir / (stem + ".graph.txt"), dir / (stem + ".stages.jsonl"),
                     dir / (stem + ".trace.jsonl")};
}

std::vector<SeedOutcome> train(const RunConfig& config, const TrainOptions& options) {
  config.validate();
  std::vector<std::uint64_t> seeds = config.schedule.seeds;
  if (options.only_seed) seeds = {*options.only_seed};
  const std::filesystem::path dir = config.schedule.output_dir;
  std::filesystem::create_directories(dir);
  for (auto seed : seeds) {
    const auto paths = output_paths(dir, seed);
    for (const auto& p : {paths.csv, paths.graph, paths.stages, paths.trace}) {
      if (std::filesystem::exists(p) && !options.force) {
        throw std::runtime_error("output " + p.string() + " already exists; pass --force to overwrite");
      }
    }
  }
  std::ofstream(dir / "config.json") << serialize_config(config);
  std::vector<SeedOutcome> out(seeds.size());
  SharedLog log(options.log);
  unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, seeds.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = run_seed(config, seeds[i], output_paths(dir, seeds[i]), log);
    return out;
  }
  // Each worker owns whole seeds; outputs never depend on the schedule.
  std::mutex next_mutex;
  std::size_t next = 0;
  std::exception_ptr error;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard lock(next_mutex);
          if (next == seeds.size()) return;
          i = next++;
        }
        try {
          out[i] = run_seed(config, seeds[i], output_paths(dir, seeds[i]), log);
        } catch (...) {
          std::lock_guard lock(next_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

bool VerifyReport::passed() const {
  return std::all_of(items.begin(), items.end(), [](const VerifyItem& i) { return i.passed; });
}

MarkovCheck check_ground_truth(const envs::EnvConfig& config, std::size_t horizon) {
  MarkovCheck check;
  const auto model = envs::make_domain(config);
  const TabularNmdp table = envs::as_tabular(*model, horizon);
  const TotalAbstraction alpha = envs::ground_truth_abstraction(*model, table);
  check.histories = table.histories().size();
  check.states = alpha.num_states;
  try {
    (void)marginalize(table, alpha);
    check.markov = true;
  } catch (const NotMarkovError& e) {
    check.message = e.what();
  }
  return check;
}

VerifyReport verify() {
  VerifyReport report;
  const oracles::StatePolicy uniform = [](std::size_t, ActionId) { return 0.5; };
  for (const auto& fixture : oracles::rdp_fixtures()) {
    const auto check = oracles::check_abstraction_automaton(fixture, uniform);
    const bool ok = check.max_deviation <= 1e-12 && check.run_mismatches == 0 &&
                    std::abs(check.total_probability - 1.0) <= 1e-12;
    report.items.push_back(VerifyItem{"automaton " + fixture.name, check.max_deviation, 1e-12, ok,
                                      std::to_string(check.episodes) + " episodes, total probability " +
                                          fixed6(check.total_probability)});
  }
  for (const auto& [name, pomdp] : {std::pair{"flicker", oracles::flicker_pomdp()},
                                    std::pair{"fully observable", oracles::fully_observable_pomdp()}}) {
    const auto check = oracles::check_belief_abstraction(pomdp, 4);
    report.items.push_back(VerifyItem{std::string("belief classes ") + name, static_cast<double>(check.violations), 0.0,
                                      check.violations == 0,
                                      std::to_string(check.beliefs) + " beliefs, " + std::to_string(check.equal_pairs) +
                                          " belief-equal pairs, max row gap " + std::to_string(check.max_row_gap)});
  }
  const auto identity = oracles::check_identity_marginalization(oracles::observation_mdp_fixture());
  report.items.push_back(VerifyItem{"identity marginalization", identity.max_deviation, 1e-12,
                                    identity.max_deviation <= 1e-12, std::to_string(identity.rows) + " rows"});
  for (auto domain : {envs::DomainKind::RotatingMab, envs::DomainKind::ResetRotatingMab,
                      envs::DomainKind::MalfunctionMab, envs::DomainKind::CheatMab,
                      envs::DomainKind::FlickeringGrid}) {
    RunConfig config = RunConfig::defaults(domain, domain == envs::DomainKind::FlickeringGrid ? 1 : 3);
    apply_preset(config, Preset::Desk);
    const auto check = check_ground_truth(config.env, 4);
    report.items.push_back(VerifyItem{"ground truth " + std::string(envs::to_string(domain)),
                                      check.markov ? 0.0 : 1.0, 0.0, check.markov,
                                      std::to_string(check.histories) + " histories, " + std::to_string(check.states) +
                                          " labels" + (check.markov ? "" : ": " + check.message)});
  }
  return report;
}

void print_report(const VerifyReport& report, std::ostream& out) {
  for (const auto& i : report.items) {
    out << (i.passed ? "PASS " : "FAIL ") << i.name << "  value " << i.value << "  threshold " << i.threshold
        << "  (" << i.detail << ")\n";
  }
  out << (report.passed() ? "verify: all checks passed\n" : "verify: some checks failed\n");
}

std::vector<TracePoint> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read trace file " + path.string());
  std::vector<TracePoint> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      out.push_back(TracePoint{j.at("seed").get<std::uint64_t>(), j.at("episode").get<std::uint64_t>(),
                               j.at("safe_steps").get<std::uint64_t>(), j.at("non_safe_steps").get<std::uint64_t>(),
                               j.value("avg_reward_per_step", 0.0)});
    } catch (const json::exception& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SafeVsCandidate> safe_vs_candidate_report(const std::vector<TracePoint>& trace) {
  std::map<std::uint64_t, SafeVsCandidate> by_seed;
  for (const auto& p : trace) {
    auto& entry = by_seed[p.seed];
    entry.seed = p.seed;
    entry.points.push_back(p);
  }
  std::vector<SafeVsCandidate> out;
  for (auto& [seed, entry] : by_seed) {
    std::vector<double> episodes, non_safe;
    for (const auto& p : entry.points) {
      episodes.push_back(static_cast<double>(p.episode));
      non_safe.push_back(static_cast<double>(p.non_safe_steps));
    }
    entry.trend = spearman(episodes, non_safe);
    out.push_back(std::move(entry));
  }
  return out;
}

void print_report(const std::vector<SafeVsCandidate>& report, std::ostream& out) {
  out << "seed,episode,safe_steps,non_safe_steps\n";
  for (const auto& s : report) {
    for (const auto& p : s.points) {
      out << p.seed << ',' << p.episode << ',' << p.safe_steps << ',' << p.non_safe_steps << '\n';
    }
  }
  for (const auto& s : report) {
    out << "# seed " << s.seed << " spearman(episode, non_safe_steps) = ";
    if (s.trend) {
      out << fixed6(*s.trend);
    } else {
      out << "undefined";
    }
    out << '\n';
  }
}

}  // namespace nmrl::harness
