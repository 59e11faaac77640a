#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hawkes {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for stream `stream` of a run seeded with `seed`. Streams are
/// decorrelated by hashing, so restart r of seed s never shares a generator
/// with restart r' of the same seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double uniform01(Rng& rng);
double normal01(Rng& rng);
double gamma_draw(Rng& rng, double shape, double rate);
/// log of a Gamma(shape, 1) draw; stays finite for tiny shapes.
double log_gamma_draw(Rng& rng, double shape);
double beta_draw(Rng& rng, double a, double b);
std::vector<double> dirichlet_draw(Rng& rng, std::span<const double> conc);
std::uint64_t poisson_draw(Rng& rng, double mean);

/// Index drawn with probabilities proportional to exp(logw). Entries equal to
/// -inf are never chosen. logw must contain at least one finite entry.
std::size_t categorical_log(Rng& rng, std::span<const double> logw);

/// Normalizes log weights in place to probabilities; returns log-sum-exp.
double softmax_inplace(std::span<double> logw);
double log_sum_exp(std::span<const double> v);

}  // namespace hawkes
