#include <iostream>

#include <CLI11.hpp>

#include "hawkes/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian semiparametric Hawkes process toolkit"};
  app.set_version_flag("--version", hawkes::cli::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  hawkes::cli::Overrides ov;
  std::string output;
  std::uint64_t seed = 0;
  int threads = 0;

  const char* names[] = {"simulate", "fit-mcmc", "fit-svi", "evaluate", "ingest"};
  const char* about[] = {"Simulate datasets from the benchmark scenario",
                         "Fit by Gibbs/Metropolis sampling with restarts",
                         "Fit by stochastic variational inference with restarts",
                         "Score fitted runs and write bands and histograms",
                         "Convert a LOBSTER message file to an event sequence"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], about[i]);
    sub->add_option("--config", config_path, "JSON config (a previous manifest.json also works)")->check(CLI::ExistingFile);
    sub->add_option("--output", output, "Output directory");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--output")) ov.output = output;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--threads")) ov.threads = threads;
  try {
    hawkes::json cfg = config_path.empty() ? hawkes::json::object() : hawkes::read_json(config_path);
    cfg = hawkes::cli::resolve_config(std::move(cfg), sub->get_name(), ov);
    return hawkes::cli::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
