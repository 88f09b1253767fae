#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nmrl/harness/config.hpp"
#include "nmrl/harness/harness.hpp"

namespace {

using namespace nmrl;

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed, bool force,
              const std::string& preset, const std::string& out_dir, bool wall_time, unsigned jobs, bool quiet) {
  harness::RunConfig config = harness::load_config(config_path);
  if (!preset.empty()) harness::apply_preset(config, harness::parse_preset(preset));
  if (!out_dir.empty()) config.schedule.output_dir = out_dir;
  if (wall_time) config.schedule.record_wall_time = true;

  harness::TrainOptions options;
  options.force = force;
  options.only_seed = seed;
  options.jobs = jobs;
  if (!quiet) options.log = &std::cerr;
  const auto outcomes = harness::train(config, options);

  int status = 0;
  for (const auto& o : outcomes) {
    std::cout << "seed " << o.seed << ": " << o.records.size() << " evaluations";
    if (!o.records.empty()) std::cout << ", final reward/step " << o.records.back().avg_reward_per_step;
    std::cout << ", " << o.violations.size() << " invariant violations";
    if (o.failure) std::cout << ", failed: " << *o.failure;
    std::cout << "  -> " << o.paths.csv.string() << '\n';
    for (const auto& v : o.violations) std::cout << "  violation: " << v << '\n';
    if (o.failure || !o.violations.empty()) status = 1;
  }
  return status;
}

int run_verify() {
  const auto report = harness::verify();
  harness::print_report(report, std::cout);
  return report.passed() ? 0 : 1;
}

int run_report(const std::string& trace_path) {
  const auto report = harness::safe_vs_candidate_report(harness::read_trace(trace_path));
  harness::print_report(report, std::cout);
  return 0;
}

int run_defaults(const std::string& domain, std::uint32_t k, const std::string& preset) {
  auto config = harness::RunConfig::defaults(envs::parse_domain(domain), k);
  if (!preset.empty()) harness::apply_preset(config, harness::parse_preset(preset));
  std::cout << harness::serialize_config(config) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming Markov abstraction learner with RMax"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, trace_path;
  std::optional<std::uint64_t> seed;
  bool force = false, wall_time = false, quiet = false;
  unsigned jobs = 0;
  auto* train = app.add_subcommand("train", "Train every seed of a config and write CSV, graph and stage logs");
  train->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "Train only this seed");
  train->add_flag("--force", force, "Overwrite existing outputs");
  train->add_option("--preset", preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  train->add_option("--out", out_dir, "Output directory (overrides schedule.output_dir)");
  train->add_flag("--wall-time", wall_time, "Record wall-clock seconds in the CSV (breaks byte-identical reruns)");
  train->add_option("--jobs", jobs, "Concurrent seeds; 0 uses every hardware thread")->capture_default_str();
  train->add_flag("--quiet", quiet, "No progress lines on stderr");

  auto* verify = app.add_subcommand("verify", "Run the exhaustive oracle checks");

  auto* report = app.add_subcommand("report", "Safe vs non-safe evaluation steps from a trace file");
  report->add_option("--trace", trace_path, "seed_<n>.trace.jsonl written by train")->required()->check(CLI::ExistingFile);

  std::string domain;
  std::uint32_t k = 2;
  std::string defaults_preset;
  auto* defaults = app.add_subcommand("defaults", "Print the default config of a domain");
  defaults->add_option("--domain", domain, "Domain name, e.g. rotating_mab")->required();
  defaults->add_option("--k", k, "Domain size parameter")->capture_default_str();
  defaults->add_option("--preset", defaults_preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(config_path, seed, force, preset, out_dir, wall_time, jobs, quiet);
    if (*verify) return run_verify();
    if (*report) return run_report(trace_path);
    if (*defaults) return run_defaults(domain, k, defaults_preset);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
