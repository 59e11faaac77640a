#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hawkes/likelihood.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

struct GammaQ {
  double shape = 1.0;
  double rate = 1.0;

  double mean() const { return shape / rate; }
  double mean_log() const;
  /// E[(log x - log mean)^2] = (psi(shape) - log shape)^2 + psi'(shape).
  double log_dev2() const;
  double entropy() const;
};

/// E[log Gamma(a+b) / (Gamma(a) Gamma(b))] lower bound by second-order
/// expansion around the variational means.
double taylor_elbo_bound(const GammaQ& a, const GammaQ& b);

/// Approximate E[log f_Beta(t | a, b, T0)] under independent Gamma factors.
double q_expected_log_beta(const GammaQ& a, const GammaQ& b, double t, double support);

struct SviConfig {
  double kappa = 0.2;
  double rho0 = 1.0;
  double tau1 = 1.0;
  double tau2 = 0.7;
  bool batch = false;  // rho_r = 1 for every r (plain coordinate ascent)
  int iterations = 500;
  int h0 = 10;
  int h = 10;
  int elbo_every = 25;
  double support = 1.0;
  Variant variant = Variant::Random;
  Hyperparams hyper;
  std::uint64_t seed = 0;

  void validate() const;
};

double learning_rate(int r, const SviConfig& cfg);

struct VariationalState {
  int k = 0, h0 = 0, h = 0;
  double support = 1.0;
  Variant variant = Variant::Random;
  std::vector<GammaQ> mu;     // K
  std::vector<GammaQ> alpha;  // K x K, row = parent
  std::vector<GammaQ> a0, b0;  // H0
  std::vector<GammaQ> ai, bi;  // K x K x H, pair-major
  std::vector<double> p0;      // Dirichlet, H0
  std::vector<std::vector<double>> pi;  // Dirichlet per pair
  double eps1 = 2.0, eps2 = 2.0;  // Beta; fixed at the variant's value for IDIO/COMMON
  std::uint64_t clamp_events = 0;

  std::size_t idx(int parent, int child, int comp) const {
    return (static_cast<std::size_t>(parent) * k + child) * h + comp;
  }
  void validate() const;
};

VariationalState initial_variational(const SviConfig& cfg, const EventSequence& seq, Rng& rng);

/// Events with times in [t_start, t_end] occupy indices [begin, end).
struct Window {
  double t_start = 0.0, t_end = 0.0;
  std::size_t begin = 0, end = 0;
  std::size_t size() const { return end - begin; }
};

Window select_window(const EventSequence& seq, double kappa, Rng& rng);
Window full_window(const EventSequence& seq);

/// Local factors for one window. For window event j (local index u = j -
/// begin) eta_b[b_off[u]] is the immigrant probability and the next
/// n_cand(u) entries follow the candidate parents in increasing index. Each
/// candidate pair q owns an (H0 + H) block of eta_wz starting at q * (H0 + H):
/// H0 common then H idiosyncratic probabilities.
struct LocalState {
  Window window;
  std::vector<std::size_t> first;  // first candidate parent of each window event
  std::vector<std::size_t> b_off;  // size window + 1
  std::vector<double> eta_b;
  std::vector<double> eta_wz;
  int width = 0;

  std::size_t n_cand(std::size_t u) const { return b_off[u + 1] - b_off[u] - 1; }
  /// Pair index of candidate c of local event u.
  std::size_t pair(std::size_t u, std::size_t c) const { return b_off[u] - u + c; }
};

/// Coordinate updates of eta_B, eta_W, eta_Z for the window events. The
/// OpenMP and serial versions produce bit-identical results.
void update_local(const VariationalState& s, const EventSequence& seq, const Window& w,
                  const ParentWindows& win, LocalState& out);
void update_local_serial(const VariationalState& s, const EventSequence& seq, const Window& w,
                         const ParentWindows& win, LocalState& out);

/// Expected counts and log-lag sums of a window, already scaled by 1/kappa.
struct WindowStats {
  std::vector<double> immigrants;  // K
  std::vector<double> offspring;   // K x K
  std::vector<double> events;      // K, window event counts per dim
  std::vector<double> n0, s0a, s0b;
  std::vector<double> ni, sia, sib;
};

WindowStats window_stats(const VariationalState& s, const EventSequence& seq, const LocalState& loc,
                         double kappa);

void update_rates(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double horizon,
                  double rho);
void update_weights(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double rho);
void update_blend(VariationalState& s, const WindowStats& st, double rho);
void update_shapes(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double rho);
void update_global(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double horizon,
                   double rho);

/// Evidence lower bound with the Taylor bound in place of the Beta
/// normalizer. `loc` must cover the whole sequence.
double elbo(const VariationalState& s, const LocalState& loc, const EventSequence& seq,
            const Hyperparams& hyper);
/// Full local pass followed by elbo().
double elbo_full(const VariationalState& s, const EventSequence& seq, const Hyperparams& hyper);

struct SviResult {
  VariationalState state;
  std::vector<std::pair<int, double>> trace;  // (iteration, elbo)
  double seconds = 0.0;
  double final_elbo() const { return trace.empty() ? 0.0 : trace.back().second; }
};

SviResult run_svi(const SviConfig& cfg, const EventSequence& seq);

std::vector<HawkesParams> sample_from_variational(const VariationalState& s, std::size_t n_draws, Rng& rng);

/// Variational means as a parameter set (Dirichlet means for weights).
HawkesParams variational_mean(const VariationalState& s);

nlohmann::json state_to_json(const VariationalState& s);
VariationalState state_from_json(const nlohmann::json& j);
void write_trace_csv(const std::vector<std::pair<int, double>>& trace, const std::string& path);

}  // namespace hawkes
