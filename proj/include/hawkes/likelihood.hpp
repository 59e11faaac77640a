#pragma once

#include <vector>

#include "hawkes/kernels.hpp"
#include "hawkes/types.hpp"

namespace hawkes {

enum class Compensator { Exact, Approx };

Compensator compensator_from_string(const std::string& s);
const char* to_string(Compensator c);

/// Candidate parents of event j: every i < j with t_j - t_i in (0, T0).
/// Because times are sorted these form the contiguous range [first[j], j).
struct ParentWindows {
  std::vector<std::size_t> first;

  ParentWindows() = default;
  ParentWindows(const EventSequence& seq, double support);

  std::size_t begin(std::size_t j) const { return first[j]; }
  std::size_t count(std::size_t j) const { return j - first[j]; }
  std::size_t total_pairs() const;
};

std::vector<std::size_t> candidate_parents(const EventSequence& seq, std::size_t j,
                                           double support);

/// lambda_k(t) summing over events strictly before t.
double intensity(const HawkesParams& params, const EventSequence& seq, int k, double t);

/// Observed-data log-likelihood. The OpenMP version is deterministic for any
/// thread count; the serial version is the reference it is tested against.
double log_likelihood(const HawkesParams& params, const EventSequence& seq,
                      Compensator mode = Compensator::Exact);
double log_likelihood_serial(const HawkesParams& params, const EventSequence& seq,
                             Compensator mode = Compensator::Exact);

/// Sum_k mu_k T + Sum_{i} Sum_l alpha(d_i, l) C(T - t_i).
double compensator(const HawkesParams& params, const EventSequence& seq, Compensator mode);

/// Complete-data log-likelihood given branching and (W, Z) allocations. The
/// allocation prior log pi is not included; see allocation_log_prior.
double augmented_log_likelihood(const HawkesParams& params, const EventSequence& seq,
                                const LatentState& latent, Compensator mode);

/// Sum over offspring of log(eps p0_h) or log((1-eps) p^{kl}_h).
double allocation_log_prior(const HawkesParams& params, const EventSequence& seq,
                            const LatentState& latent);

/// Branching-only complete-data likelihood with (W, Z) marginalized.
double branching_log_likelihood(const HawkesParams& params, const EventSequence& seq,
                                std::span<const std::ptrdiff_t> parent, Compensator mode);

double spectral_radius(const Eigen::MatrixXd& alpha);

}  // namespace hawkes
