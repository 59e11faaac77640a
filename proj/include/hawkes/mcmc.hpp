#pragma once

#include <cstdint>
#include <vector>

#include "hawkes/likelihood.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

struct McmcConfig {
  int iterations = 2000;
  int burn_in = 1000;
  Variant variant = Variant::Random;
  int h0 = 10;  // common truncation
  int h = 10;   // idiosyncratic truncation
  double mh_step = 0.3;
  bool adapt = false;  // Robbins-Monro step tuning during burn-in
  double target_accept = 0.35;
  double support = 1.0;
  Compensator compensator = Compensator::Approx;
  Hyperparams hyper;
  std::uint64_t seed = 0;
  int thin = 1;

  void validate() const;
};

struct McmcState {
  HawkesParams params;
  LatentState latent;
};

/// Counts and log-lag sums implied by a latent state.
struct SuffStats {
  int k = 0, h0 = 0, h = 0;
  std::vector<double> immigrants;  // |I_l|
  Eigen::MatrixXd offspring;       // |O_{k,l}|
  std::vector<double> n0, s0a, s0b;  // per common component: N, sum log(x/T0), sum log(1-x/T0)
  std::vector<double> ni, sia, sib;  // per (pair, component), pair-major

  std::size_t idx(int parent, int child, int comp) const {
    return (static_cast<std::size_t>(parent) * k + child) * h + comp;
  }
  double total_common() const;
  double total_idio() const;
};

SuffStats sufficient_stats(const EventSequence& seq, const LatentState& latent, int h0, int h,
                           double support);

struct GammaParams {
  double shape;
  double rate;
  bool operator==(const GammaParams&) const = default;
};

struct RateConditionals {
  std::vector<GammaParams> mu;
  std::vector<GammaParams> alpha;  // K x K row-major, row = parent
};

RateConditionals rate_conditionals(const SuffStats& st, const EventSequence& seq,
                                   const HawkesParams& params, const Hyperparams& hyper,
                                   Compensator mode);

struct WeightConditionals {
  std::vector<double> common;               // Dirichlet concentration
  std::vector<std::vector<double>> idio;    // per pair
  double eps_a = 1.0, eps_b = 1.0;          // Beta
};

WeightConditionals weight_conditionals(const SuffStats& st, const Hyperparams& hyper);

/// Unnormalized log full conditional of one Beta component's shapes given
/// n allocated lags with the two log sums; includes the Gamma priors.
double shape_log_target(double a, double b, double n, double sa, double sb, const ShapePrior& prior,
                        double support);

/// Log MH acceptance ratio for a log-scale random walk move of `a` (or `b`
/// when `which_b`), Jacobian included.
double mh_log_ratio(double a, double b, double proposed, bool which_b, double n, double sa, double sb,
                    const ShapePrior& prior, double support);

/// Log weights of [immigrant, candidate parents...] for event j.
void branching_log_weights(const HawkesParams& params, const CompiledExcitation& ex,
                           const EventSequence& seq, const ParentWindows& win, std::size_t j,
                           std::vector<double>& out);

/// Log weights of the H0 common then H idiosyncratic allocations of a lag.
void allocation_log_weights(const HawkesParams& params, int parent, int child, double lag,
                            std::vector<double>& out);

McmcState initial_state(const McmcConfig& cfg, const EventSequence& seq, Rng& rng);

struct ShapeAcceptance {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
};

void sample_branching(McmcState& s, const EventSequence& seq, const ParentWindows& win, Rng& rng);
void sample_allocations(McmcState& s, const EventSequence& seq, Variant variant, Rng& rng);
void sample_rates(McmcState& s, const EventSequence& seq, const SuffStats& st,
                  const Hyperparams& hyper, Compensator mode, Rng& rng);
/// steps holds one log-scale proposal sd per shape parameter, in the order
/// common a, common b, then per pair/component a, b.
ShapeAcceptance sample_shapes(McmcState& s, const SuffStats& st, const Hyperparams& hyper,
                              std::span<const double> steps, Rng& rng,
                              std::vector<unsigned char>* accepted = nullptr);
void sample_weights(McmcState& s, const SuffStats& st, const Hyperparams& hyper, Variant variant,
                    Rng& rng);

struct PosteriorSamples {
  std::vector<HawkesParams> draws;
  std::vector<double> loglik;
  ShapeAcceptance shape_moves;
  double seconds = 0.0;
  double mean_loglik() const;
};

PosteriorSamples run_chain(const McmcConfig& cfg, const EventSequence& seq);

/// Index of the run with the largest mean log-likelihood; ties to the lowest.
std::size_t select_best_restart(const std::vector<PosteriorSamples>& runs);

/// One row per draw: mu_k, alpha_k_l, eps, p0_h, a0_h, b0_h, p_k_l_h, a_k_l_h,
/// b_k_l_h (1-based indices), then loglik.
void write_samples_csv(const PosteriorSamples& s, const std::string& path);
PosteriorSamples read_samples_csv(const std::string& path, double support);

}  // namespace hawkes
