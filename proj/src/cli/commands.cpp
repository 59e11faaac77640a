#include "hawkes/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>
#include <tuple>

namespace hawkes::cli {

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != rows) throw std::invalid_argument("matrix must be square");
    for (Eigen::Index c = 0; c < rows; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

struct TaskStatus {
  bool ok = false;
  std::string error;
};

/// Runs fn(i) for i in [0, n) on the OpenMP team; a throwing task is
/// recorded and does not stop the others.
std::vector<TaskStatus> run_tasks(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::vector<TaskStatus> st(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& s = st[static_cast<std::size_t>(i)];
    try {
      fn(static_cast<std::size_t>(i));
      s.ok = true;
    } catch (const std::exception& e) {
      s.error = e.what();
    } catch (...) {
      s.error = "unknown error";
    }
  }
  return st;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json finish_manifest(json config, json tasks, bool ok, std::chrono::steady_clock::time_point t0) {
  config["manifest"] = {{"version", kVersion},
                        {"threads", omp_get_max_threads()},
                        {"wall_seconds", seconds_since(t0)},
                        {"tasks", std::move(tasks)},
                        {"ok", ok}};
  write_json(config, fs::path(config.at("output_dir").get<std::string>()) / "manifest.json");
  return config;
}

std::vector<Variant> variants_of(const json& block, Variant fallback) {
  std::vector<Variant> out;
  if (block.contains("variants")) {
    for (const auto& v : block.at("variants")) out.push_back(variant_from_string(v.get<std::string>()));
  } else {
    out.push_back(fallback);
  }
  if (out.empty()) throw std::invalid_argument("variants must not be empty");
  return out;
}

json variants_to_json(const std::vector<Variant>& vs) {
  json out = json::array();
  for (Variant v : vs) out.push_back(to_string(v));
  return out;
}

/// Dataset stems under `data`: every events.json below a directory, sorted,
/// or else `data` itself as a stem.
std::vector<std::pair<fs::path, fs::path>> find_datasets(const fs::path& data) {
  std::vector<std::pair<fs::path, fs::path>> out;  // (stem, relative output dir)
  if (!fs::is_directory(data)) {
    fs::path single = data;
    single += ".json";
    if (!fs::is_regular_file(single)) throw std::runtime_error("no dataset at " + data.string());
    out.emplace_back(data, fs::path());
    return out;
  }
  for (const auto& e : fs::recursive_directory_iterator(data))
    if (e.is_regular_file() && e.path().filename() == "events.json") {
      const fs::path dir = e.path().parent_path();
      out.emplace_back(dir / "events", fs::relative(dir, data));
    }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw std::runtime_error("no events.json found under " + data.string());
  return out;
}

std::string eps_label(double eps) { return "eps_" + format_double(eps); }

}  // namespace

McmcConfig mcmc_from_json(const json& j) {
  McmcConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.burn_in = j.value("burn_in", c.burn_in);
  if (j.contains("variant")) c.variant = variant_from_string(j["variant"].get<std::string>());
  c.h0 = j.value("h0", c.h0);
  c.h = j.value("h", c.h);
  c.mh_step = j.value("mh_step", c.mh_step);
  c.adapt = j.value("adapt", c.adapt);
  c.target_accept = j.value("target_accept", c.target_accept);
  c.support = j.value("T0", c.support);
  if (j.contains("compensator")) c.compensator = compensator_from_string(j["compensator"].get<std::string>());
  if (j.contains("hyper")) c.hyper = hyper_from_json(j["hyper"]);
  c.thin = j.value("thin", c.thin);
  c.validate();
  return c;
}

json mcmc_to_json(const McmcConfig& c) {
  return {{"iterations", c.iterations}, {"burn_in", c.burn_in},   {"variant", to_string(c.variant)},
          {"h0", c.h0},                 {"h", c.h},               {"mh_step", c.mh_step},
          {"adapt", c.adapt},           {"target_accept", c.target_accept},
          {"T0", c.support},            {"compensator", to_string(c.compensator)},
          {"hyper", hyper_to_json(c.hyper)},                      {"thin", c.thin}};
}

SviConfig svi_from_json(const json& j) {
  SviConfig c;
  c.kappa = j.value("kappa", c.kappa);
  c.rho0 = j.value("rho0", c.rho0);
  c.tau1 = j.value("tau1", c.tau1);
  c.tau2 = j.value("tau2", c.tau2);
  c.batch = j.value("batch", c.batch);
  c.iterations = j.value("iterations", c.iterations);
  c.h0 = j.value("h0", c.h0);
  c.h = j.value("h", c.h);
  c.elbo_every = j.value("elbo_every", c.elbo_every);
  c.support = j.value("T0", c.support);
  if (j.contains("variant")) c.variant = variant_from_string(j["variant"].get<std::string>());
  if (j.contains("hyper")) c.hyper = hyper_from_json(j["hyper"]);
  c.validate();
  return c;
}

json svi_to_json(const SviConfig& c) {
  return {{"kappa", c.kappa},   {"rho0", c.rho0},         {"tau1", c.tau1},
          {"tau2", c.tau2},     {"batch", c.batch},       {"iterations", c.iterations},
          {"h0", c.h0},         {"h", c.h},               {"elbo_every", c.elbo_every},
          {"T0", c.support},    {"variant", to_string(c.variant)},
          {"hyper", hyper_to_json(c.hyper)}};
}

IngestConfig ingest_from_json(const json& j) {
  IngestConfig c;
  c.session_start = j.value("session_start", c.session_start);
  c.session_end = j.value("session_end", c.session_end);
  c.min_volume = j.value("min_volume", c.min_volume);
  c.level = j.value("level", c.level);
  c.accept_without_book = j.value("accept_without_book", c.accept_without_book);
  c.include_hidden = j.value("include_hidden", c.include_hidden);
  if (j.contains("grouping")) {
    c.grouping.clear();
    for (const auto& g : j["grouping"])
      c.grouping[{g.at("type").get<int>(), g.at("direction").get<int>()}] = g.at("dim").get<int>();
  }
  c.validate();
  return c;
}

json ingest_to_json(const IngestConfig& c) {
  json grouping = json::array();
  for (const auto& [key, dim] : c.grouping)
    grouping.push_back({{"type", key.first}, {"direction", key.second}, {"dim", dim}});
  return {{"session_start", c.session_start},
          {"session_end", c.session_end},
          {"min_volume", c.min_volume},
          {"level", c.level},
          {"accept_without_book", c.accept_without_book},
          {"include_hidden", c.include_hidden},
          {"grouping", grouping}};
}

json scenario_to_json(const SimScenario& sc, bool exponential, double eps_true) {
  json j = {{"truth", exponential ? "exponential" : "beta"},
            {"eps_true", eps_true},
            {"horizon", sc.horizon},
            {"seed", sc.seed},
            {"mu", sc.mu},
            {"alpha", matrix_to_json(sc.alpha)}};
  if (exponential) {
    const auto& e = std::get<ExponentialBlend>(sc.excitation);
    j["rate"] = matrix_to_json(e.rate);
  } else {
    j["excitation"] = params_to_json(scenario_params(sc)).at("excitation");
  }
  return j;
}

SimScenario scenario_from_json(const json& j) {
  SimScenario sc;
  sc.mu = j.at("mu").get<std::vector<double>>();
  sc.alpha = matrix_from_json(j.at("alpha"));
  sc.horizon = j.at("horizon").get<double>();
  sc.seed = j.value("seed", std::uint64_t{0});
  const std::string truth = j.value("truth", std::string("beta"));
  if (truth == "exponential") {
    sc.excitation = ExponentialBlend{j.at("eps_true").get<double>(), matrix_from_json(j.at("rate"))};
  } else if (truth == "beta") {
    json p = {{"mu", sc.mu}, {"alpha", j.at("alpha")}, {"excitation", j.at("excitation")}};
    sc.excitation = params_from_json(p).excitation;
  } else {
    throw std::invalid_argument("unknown truth: " + truth);
  }
  if (sc.alpha.rows() != sc.num_dims()) throw std::invalid_argument("scenario: alpha must be K x K");
  return sc;
}

json resolve_config(json config, const std::string& command, const Overrides& ov) {
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
  config.erase("manifest");
  if (config.contains("command") && config["command"].get<std::string>() != command)
    throw std::invalid_argument("config is for command '" + config["command"].get<std::string>() + "', not '" +
                                command + "'");
  config["command"] = command;
  if (ov.output) config["output_dir"] = *ov.output;
  if (ov.seed) config["seed"] = *ov.seed;
  if (ov.threads) config["threads"] = *ov.threads;
  if (!config.contains("output_dir")) throw std::invalid_argument("no output directory (use --output)");
  if (!config.contains("seed")) config["seed"] = std::uint64_t{0};
  const int threads = config.value("threads", 0);
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
  config["threads"] = threads;
  return config;
}

json cmd_simulate(const json& config_in) {
  const auto t0 = std::chrono::steady_clock::now();
  json config = config_in;
  const fs::path out = config.at("output_dir").get<std::string>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const int reps = config.value("replications", 1);
  if (reps < 1) throw std::invalid_argument("replications must be >= 1");
  json sc = config.value("scenario", json::object());
  const double horizon = sc.value("horizon", 15000.0);
  const std::string truth = sc.value("truth", std::string("beta"));
  if (truth != "beta" && truth != "exponential") throw std::invalid_argument("scenario.truth must be beta or exponential");
  const auto grid = sc.value("eps_grid", std::vector<double>{0.0, 0.2, 0.5, 0.8, 1.0});
  if (grid.empty()) throw std::invalid_argument("scenario.eps_grid must not be empty");
  sc["horizon"] = horizon;
  sc["truth"] = truth;
  sc["eps_grid"] = grid;
  config["scenario"] = sc;
  config["replications"] = reps;

  struct Job {
    double eps;
    int rep;
    std::uint64_t seed;
    fs::path dir;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < grid.size(); ++e)
    for (int r = 0; r < reps; ++r)
      jobs.push_back({grid[e], r, stream_seed(stream_seed(seed, e), static_cast<std::uint64_t>(r)),
                      out / truth / eps_label(grid[e]) / ("rep_" + std::to_string(r + 1))});
  const bool exponential = truth == "exponential";
  const auto st = run_tasks(jobs.size(), [&](std::size_t i) {
    const Job& jb = jobs[i];
    const SimScenario scen = benchmark_scenario(jb.eps, exponential, horizon, jb.seed);
    const SimulationResult res = simulate_branching(scen);
    write_sequence(res.events, jb.dir / "events");
    write_json(scenario_to_json(scen, exponential, jb.eps), jb.dir / "truth.json");
    write_branching(res.latent, jb.dir / "branching.csv");
  });
  json tasks = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    json t = {{"dataset", fs::relative(jobs[i].dir, out).generic_string()},
              {"eps_true", jobs[i].eps},
              {"seed", jobs[i].seed},
              {"ok", st[i].ok}};
    if (!st[i].ok) t["error"] = st[i].error;
    ok = ok && st[i].ok;
    tasks.push_back(t);
  }
  return finish_manifest(config, tasks, ok, t0);
}

json cmd_fit(const json& config_in, bool svi) {
  const auto t0 = std::chrono::steady_clock::now();
  json config = config_in;
  const fs::path out = config.at("output_dir").get<std::string>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const int restarts = config.value("restarts", 1);
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  config["restarts"] = restarts;
  const fs::path data = config.at("data").get<std::string>();
  const char* method = svi ? "svi" : "mcmc";
  const json block = config.value(method, json::object());
  std::vector<Variant> variants;
  McmcConfig mcfg;
  SviConfig scfg;
  if (svi) {
    scfg = svi_from_json(block);
    variants = variants_of(block, scfg.variant);
    config[method] = svi_to_json(scfg);
  } else {
    mcfg = mcmc_from_json(block);
    variants = variants_of(block, mcfg.variant);
    config[method] = mcmc_to_json(mcfg);
  }
  config[method]["variants"] = variants_to_json(variants);
  const auto datasets = find_datasets(data);

  struct Job {
    std::size_t dataset;
    std::size_t variant;
    int restart;
    std::uint64_t seed;
    fs::path group_dir;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t v = 0; v < variants.size(); ++v)
      for (int r = 0; r < restarts; ++r)
        jobs.push_back({d, v, r, stream_seed(stream_seed(seed, d), v * 65536 + static_cast<std::uint64_t>(r)),
                        out / datasets[d].second / (std::string(method) + "_" + to_string(variants[v]))});
  std::vector<double> score(jobs.size(), -std::numeric_limits<double>::infinity());
  std::vector<double> secs(jobs.size(), 0.0);
  const auto st = run_tasks(jobs.size(), [&](std::size_t i) {
    const Job& jb = jobs[i];
    const EventSequence seq = read_sequence(datasets[jb.dataset].first);
    const fs::path dir = jb.group_dir / ("restart_" + std::to_string(jb.restart + 1));
    fs::create_directories(dir);
    if (svi) {
      SviConfig c = scfg;
      c.variant = variants[jb.variant];
      c.seed = jb.seed;
      const SviResult res = run_svi(c, seq);
      write_json(state_to_json(res.state), dir / "state.json");
      write_trace_csv(res.trace, dir / "trace.csv");
      score[i] = res.final_elbo();
      secs[i] = res.seconds;
    } else {
      McmcConfig c = mcfg;
      c.variant = variants[jb.variant];
      c.seed = jb.seed;
      const PosteriorSamples res = run_chain(c, seq);
      write_samples_csv(res, dir / "samples.csv");
      score[i] = res.mean_loglik();
      secs[i] = res.seconds;
    }
  });

  // Selection per (dataset, variant) over the restarts that succeeded.
  json tasks = json::array();
  bool ok = true;
  for (std::size_t g = 0; g < jobs.size(); g += static_cast<std::size_t>(restarts)) {
    const Job& head = jobs[g];
    json runs = json::array();
    std::optional<std::size_t> best;
    for (int r = 0; r < restarts; ++r) {
      const std::size_t i = g + static_cast<std::size_t>(r);
      json run = {{"restart", r + 1}, {"seed", jobs[i].seed}, {"ok", st[i].ok}};
      if (st[i].ok) {
        run["score"] = score[i];
        if (!best || score[i] > score[*best]) best = i;
      } else {
        run["error"] = st[i].error;
        ok = false;
      }
      runs.push_back(run);
      tasks.push_back({{"run", fs::relative(head.group_dir, out).generic_string()},
                       {"restart", r + 1},
                       {"seed", jobs[i].seed},
                       {"ok", st[i].ok},
                       {"seconds", secs[i]}});
      if (!st[i].ok) tasks.back()["error"] = st[i].error;
    }
    json sel = {{"data", fs::absolute(datasets[head.dataset].first).generic_string()},
                {"method", method},
                {"variant", to_string(variants[head.variant])},
                {"selection", svi ? "final_elbo" : "mean_loglik"},
                {"restarts", runs}};
    sel["selected"] = best ? json(static_cast<int>(*best - g) + 1) : json(nullptr);
    if (svi) sel["T0"] = scfg.support;
    else sel["T0"] = mcfg.support;
    write_json(sel, head.group_dir / "selected.json");
  }
  return finish_manifest(config, tasks, ok, t0);
}

void write_metric_rows(const std::vector<MetricRow>& rows, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path.string());
  o << "method,variant,eps_true,seed,metric,value\n";
  for (const auto& r : rows)
    o << r.method << ',' << r.variant << ',' << format_double(r.eps_true) << ',' << r.seed << ',' << r.metric << ','
      << format_double(r.value) << '\n';
}

void write_summary_table(const std::vector<MetricRow>& rows, const fs::path& path) {
  std::map<std::tuple<std::string, std::string, double, std::string>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.method, r.variant, r.eps_true, r.metric}].push_back(r.value);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path.string());
  o << "method,variant,eps_true,metric,n,mean,sd,cell\n";
  char buf[64];
  for (const auto& [key, v] : groups) {
    const auto& [method, variant, eps, metric] = key;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    std::string sd, cell;
    std::snprintf(buf, sizeof buf, "%.3f", mean);
    cell = buf;
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double s = std::sqrt(ss / static_cast<double>(v.size() - 1));
      sd = format_double(s);
      std::snprintf(buf, sizeof buf, " (%.3f)", s);
      cell += buf;
    }
    o << method << ',' << variant << ',' << format_double(eps) << ',' << metric << ',' << v.size() << ','
      << format_double(mean) << ',' << sd << ',' << cell << '\n';
  }
}

json cmd_evaluate(const json& config_in) {
  const auto t0 = std::chrono::steady_clock::now();
  json config = config_in;
  const fs::path out = config.at("output_dir").get<std::string>();
  const fs::path runs_root = config.at("runs").get<std::string>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  GridSpec grid;
  grid.n_points = config.value("grid_points", grid.n_points);
  const double level = config.value("level", 0.95);
  const int svi_draws = config.value("svi_draws", 1000);
  const int bins = config.value("histogram_bins", 50);
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0, 1)");
  if (svi_draws < 2) throw std::invalid_argument("svi_draws must be >= 2");
  config["grid_points"] = grid.n_points;
  config["level"] = level;
  config["svi_draws"] = svi_draws;
  config["histogram_bins"] = bins;

  std::vector<fs::path> selections;
  if (!fs::is_directory(runs_root)) throw std::runtime_error("no run directory at " + runs_root.string());
  for (const auto& e : fs::recursive_directory_iterator(runs_root))
    if (e.is_regular_file() && e.path().filename() == "selected.json") selections.push_back(e.path());
  std::sort(selections.begin(), selections.end());
  if (selections.empty()) throw std::runtime_error("no fitted runs under " + runs_root.string());

  std::vector<std::vector<MetricRow>> rows(selections.size());
  const auto st = run_tasks(selections.size(), [&](std::size_t i) {
    const json sel = read_json(selections[i]);
    if (sel.at("selected").is_null()) throw std::runtime_error("every restart failed");
    const int pick = sel.at("selected").get<int>();
    const fs::path group = selections[i].parent_path();
    const fs::path run_dir = group / ("restart_" + std::to_string(pick));
    const std::string method = sel.at("method").get<std::string>();
    const double support = sel.at("T0").get<double>();
    std::vector<HawkesParams> draws;
    if (method == "mcmc") {
      draws = read_samples_csv((run_dir / "samples.csv").string(), support).draws;
    } else {
      const VariationalState vs = state_from_json(read_json(run_dir / "state.json"));
      Rng rng = make_rng(stream_seed(seed, i), 0);
      draws = sample_from_variational(vs, static_cast<std::size_t>(svi_draws), rng);
    }
    if (draws.size() < 2) throw std::runtime_error("fewer than 2 posterior draws");
    GridSpec g = grid;
    g.support = support;
    const CurveSamples cs = curve_samples(draws, g);
    const fs::path dest = out / fs::relative(group, runs_root);
    fs::create_directories(dest);
    write_bands_csv(excitation_bands(cs, level), (dest / "bands.csv").string());
    std::vector<Eigen::MatrixXd> alphas;
    for (const auto& d : draws) alphas.push_back(d.alpha);
    const SpectralHistogram h = spectral_histogram(alphas, bins);
    write_histogram_csv(h, (dest / "spectral_histogram.csv").string());
    json summary = {{"draws", draws.size()}, {"stationary_fraction", h.stationary_fraction}};

    const fs::path truth_path = fs::path(sel.at("data").get<std::string>()).parent_path() / "truth.json";
    if (fs::is_regular_file(truth_path)) {
      const SimScenario sc = scenario_from_json(read_json(truth_path));
      const TruthCurve truth = [&sc](int d, int l, double x) { return sc.truth_density(d, l, x); };
      const double eps = read_json(truth_path).at("eps_true").get<double>();
      const std::string variant = sel.at("variant").get<std::string>();
      const double m_rmise = rmise(truth, cs);
      const double m_acr = coverage_acr(cs, truth, level);
      const double m_is = interval_score(cs, truth, level);
      rows[i] = {{method, variant, eps, sc.seed, "rmise", m_rmise},
                 {method, variant, eps, sc.seed, "acr", m_acr},
                 {method, variant, eps, sc.seed, "interval_score", m_is}};
      summary["rmise"] = m_rmise;
      summary["acr"] = m_acr;
      summary["interval_score"] = m_is;
    }
    write_json(summary, dest / "summary.json");
  });

  std::vector<MetricRow> all;
  json tasks = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < selections.size(); ++i) {
    all.insert(all.end(), rows[i].begin(), rows[i].end());
    json t = {{"run", fs::relative(selections[i].parent_path(), runs_root).generic_string()}, {"ok", st[i].ok}};
    if (!st[i].ok) t["error"] = st[i].error;
    ok = ok && st[i].ok;
    tasks.push_back(t);
  }
  if (!all.empty()) {
    write_metric_rows(all, out / "metrics.csv");
    write_summary_table(all, out / "table.csv");
  }
  return finish_manifest(config, tasks, ok, t0);
}

json cmd_ingest(const json& config_in) {
  const auto t0 = std::chrono::steady_clock::now();
  json config = config_in;
  const fs::path out = config.at("output_dir").get<std::string>();
  const std::string messages = config.at("messages").get<std::string>();
  const IngestConfig icfg = ingest_from_json(config.value("ingest", json::object()));
  config["ingest"] = ingest_to_json(icfg);
  const ParsedMessages parsed = parse_messages(messages);
  std::vector<BookRow> book;
  const bool has_book = config.contains("orderbook") && !config["orderbook"].is_null();
  if (has_book) book = parse_orderbook(config["orderbook"].get<std::string>());
  IngestReport rep;
  const EventSequence seq = build_event_sequence(parsed, has_book ? &book : nullptr, icfg, &rep);
  write_sequence(seq, out / "events");
  json issues = json::array();
  for (const auto& is : parsed.issues) issues.push_back({{"line", is.line}, {"reason", is.reason}});
  const auto counts = seq.counts();
  write_json({{"read", rep.read},
              {"malformed", issues},
              {"outside_session", rep.outside_session},
              {"below_volume", rep.below_volume},
              {"off_level", rep.off_level},
              {"ungrouped", rep.ungrouped},
              {"jittered", rep.jittered},
              {"retained", seq.size()},
              {"counts", counts},
              {"warnings", rep.warnings}},
             out / "ingest_report.json");
  return finish_manifest(config, json::array({{{"messages", messages}, {"ok", true}}}), true, t0);
}

int run(const json& config) {
  const int threads = config.value("threads", 0);
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
  const std::string cmd = config.at("command").get<std::string>();
  json manifest;
  if (cmd == "simulate") manifest = cmd_simulate(config);
  else if (cmd == "fit-mcmc") manifest = cmd_fit(config, false);
  else if (cmd == "fit-svi") manifest = cmd_fit(config, true);
  else if (cmd == "evaluate") manifest = cmd_evaluate(config);
  else if (cmd == "ingest") manifest = cmd_ingest(config);
  else throw std::invalid_argument("unknown command: " + cmd);
  const auto& m = manifest.at("manifest");
  for (const auto& t : m.at("tasks"))
    if (!t.at("ok").get<bool>()) std::cerr << "task failed: " << t.dump() << '\n';
  return m.at("ok").get<bool>() ? 0 : 1;
}

}  // namespace hawkes::cli
