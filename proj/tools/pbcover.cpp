#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "pbcover/cli.hpp"

int main(int argc, char** argv) {
  using namespace pbcover;
  CLI::App app{"pb of finite and continuous covers of surfaces"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;

  const std::vector<std::pair<RunKind, const char*>> kinds{
      {RunKind::PbEval, "evaluate pb of the canonical partition of a cover"},
      {RunKind::Minimize, "minimize pb over the parametric partition family"},
      {RunKind::Sweep, "pb(c) over a list of capacities"},
      {RunKind::Check, "run a consistency check"},
      {RunKind::Hilbert, "check measure preservation of the Hilbert curve"}};
  for (const auto& [kind, help] : kinds) {
    auto* sub = app.add_subcommand(to_string(kind), help);
    sub->add_option("--config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: config 'out', then $PBCOVER_OUT, then ./out)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--threads", threads, "pb worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  RunKind kind = RunKind::PbEval;
  for (const auto& [k, help] : kinds)
    if (app.got_subcommand(to_string(k))) kind = k;

  RunConfig config;
  try {
    config = load_run_config(config_path, kind, seed);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (!out_dir.empty()) {
    config.out = out_dir;
  } else if (!config.document.contains("out")) {
    if (const char* env = std::getenv("PBCOVER_OUT")) config.out = env;
  }
  config.threads = threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : threads;

  const auto outcome = run(config);
  if (outcome.exit_code != 0) std::cerr << outcome.message << "\n";
  for (const auto& f : outcome.files) std::cout << f.string() << "\n";
  return outcome.exit_code;
}
