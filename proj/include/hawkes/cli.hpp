#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/eval.hpp"
#include "hawkes/io.hpp"
#include "hawkes/lobster.hpp"
#include "hawkes/mcmc.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/svi.hpp"

namespace hawkes::cli {

inline constexpr const char* kVersion = "0.1.0";

// Config blocks. Each *_from_json starts from defaults and overrides the keys
// present; *_to_json writes every field so a manifest is a complete config.
McmcConfig mcmc_from_json(const json& j);
json mcmc_to_json(const McmcConfig& c);
SviConfig svi_from_json(const json& j);
json svi_to_json(const SviConfig& c);
IngestConfig ingest_from_json(const json& j);
json ingest_to_json(const IngestConfig& c);

/// Truth description stored next to each simulated dataset.
json scenario_to_json(const SimScenario& sc, bool exponential, double eps_true);
SimScenario scenario_from_json(const json& j);

struct Overrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Merges overrides into the config and fills `command`, `output_dir`, `seed`.
json resolve_config(json config, const std::string& command, const Overrides& ov);

/// Each command returns the manifest it wrote; manifest["status"]["ok"] is
/// true only if every task succeeded.
json cmd_simulate(const json& config);
json cmd_fit(const json& config, bool svi);
json cmd_evaluate(const json& config);
json cmd_ingest(const json& config);

/// Dispatches on config["command"]; returns the process exit code.
int run(const json& config);

struct MetricRow {
  std::string method, variant;
  double eps_true;
  std::uint64_t seed;
  std::string metric;
  double value;
};

/// "mean(sd)" table grouped by (method, variant, eps_true, metric) in sorted
/// order. sd is the sample standard deviation, empty for one replication.
void write_metric_rows(const std::vector<MetricRow>& rows, const fs::path& path);
void write_summary_table(const std::vector<MetricRow>& rows, const fs::path& path);

}  // namespace hawkes::cli
