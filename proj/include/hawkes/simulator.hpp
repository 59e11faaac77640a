#pragma once

#include <cstdint>
#include <variant>

#include "hawkes/rng.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

/// Misspecified truth: lag density eps Exp(1) + (1 - eps) Exp(rate(parent, child)).
/// Infinite support; lags beyond T0 are kept.
struct ExponentialBlend {
  double eps = 0.5;
  Eigen::MatrixXd rate;

  double density(int parent, int child, double lag) const;
  double cdf(int parent, int child, double lag) const;
};

using TrueExcitation = std::variant<ExcitationModel, ExponentialBlend>;

struct SimScenario {
  std::vector<double> mu;
  Eigen::MatrixXd alpha;  // alpha(parent, child)
  TrueExcitation excitation;
  double horizon = 0.0;
  std::uint64_t seed = 0;

  int num_dims() const { return static_cast<int>(mu.size()); }
  /// Lag density of the truth; used by eval as the reference curve.
  double truth_density(int parent, int child, double lag) const;
};

/// The K = 2 design with the Beta-mixture truth (exponential = false) or the
/// exponential truth, at blend weight eps_true.
SimScenario benchmark_scenario(double eps_true, bool exponential, double horizon, std::uint64_t seed);

/// Exposes the Beta-mixture truth as model parameters (for likelihood checks).
HawkesParams scenario_params(const SimScenario& sc);

struct SimulationResult {
  EventSequence events;
  LatentState latent;  // alloc meaningful only for Beta-mixture truths
};

/// Cluster construction. Each event owns a key derived from its parent's key
/// and its own birth index; all of its offspring draws come from a generator
/// seeded by that key, so results do not depend on traversal order.
SimulationResult simulate_branching(const SimScenario& sc);

/// Ogata thinning against a dominating rate. Independent of the branching
/// construction; used to cross-check it.
EventSequence simulate_thinning(const SimScenario& sc);

/// Lambda = (I - A^T)^{-1} mu.
std::vector<double> expected_rates(const std::vector<double>& mu, const Eigen::MatrixXd& alpha);
std::vector<double> expected_rates(const HawkesParams& params);

}  // namespace hawkes
