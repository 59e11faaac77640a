#include "hawkes/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hawkes {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(stream_seed(seed, stream)); }

double uniform01(Rng& rng) {
  // 53 random bits, strictly inside (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal01(Rng& rng) {
  std::normal_distribution<double> nd;
  return nd(rng);
}

double gamma_draw(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw std::domain_error("gamma_draw: bad parameters");
  if (shape < 1.0) return std::exp(log_gamma_draw(rng, shape)) / rate;
  std::gamma_distribution<double> gd(shape, 1.0);
  return gd(rng) / rate;
}

double log_gamma_draw(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw std::domain_error("log_gamma_draw: bad shape");
  if (shape >= 1.0) {
    std::gamma_distribution<double> gd(shape, 1.0);
    return std::log(gd(rng));
  }
  // G(s) = G(s+1) U^{1/s}
  std::gamma_distribution<double> gd(shape + 1.0, 1.0);
  return std::log(gd(rng)) + std::log(uniform01(rng)) / shape;
}

double beta_draw(Rng& rng, double a, double b) {
  const double la = log_gamma_draw(rng, a);
  const double lb = log_gamma_draw(rng, b);
  const double m = std::max(la, lb);
  return std::exp(la - m) / (std::exp(la - m) + std::exp(lb - m));
}

std::vector<double> dirichlet_draw(Rng& rng, std::span<const double> conc) {
  std::vector<double> lg(conc.size());
  for (std::size_t i = 0; i < conc.size(); ++i) lg[i] = log_gamma_draw(rng, conc[i]);
  softmax_inplace(lg);
  return lg;
}

std::uint64_t poisson_draw(Rng& rng, double mean) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson_draw: negative mean");
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> pd(mean);
  return pd(rng);
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double softmax_inplace(std::span<double> logw) {
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) throw std::domain_error("softmax: no finite weight");
  for (double& x : logw) x = std::exp(x - lse);
  return lse;
}

std::size_t categorical_log(Rng& rng, std::span<const double> logw) {
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) throw std::domain_error("categorical_log: no finite weight");
  const double u = uniform01(rng);
  double c = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    if (logw[i] == -std::numeric_limits<double>::infinity()) continue;
    c += std::exp(logw[i] - lse);
    last = i;
    if (u < c) return i;
  }
  return last;
}

}  // namespace hawkes
