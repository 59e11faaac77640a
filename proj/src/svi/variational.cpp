#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "hawkes/kernels.hpp"
#include "hawkes/svi.hpp"

namespace hawkes {

using boost::math::digamma;
using boost::math::trigamma;

double GammaQ::mean_log() const { return digamma(shape) - std::log(rate); }

double GammaQ::log_dev2() const {
  const double d = digamma(shape) - std::log(shape);
  return d * d + trigamma(shape);
}

double GammaQ::entropy() const {
  return shape - std::log(rate) + std::lgamma(shape) + (1.0 - shape) * digamma(shape);
}

double taylor_elbo_bound(const GammaQ& a, const GammaQ& b) {
  const double am = a.mean(), bm = b.mean();
  const double da = a.mean_log() - std::log(am);
  const double db = b.mean_log() - std::log(bm);
  const double psi_ab = digamma(am + bm);
  const double tri_ab = trigamma(am + bm);
  return log_beta_norm(am, bm) + am * (psi_ab - digamma(am)) * da + bm * (psi_ab - digamma(bm)) * db +
         0.5 * am * am * (tri_ab - trigamma(am)) * a.log_dev2() +
         0.5 * bm * bm * (tri_ab - trigamma(bm)) * b.log_dev2() + am * bm * tri_ab * da * db;
}

double q_expected_log_beta(const GammaQ& a, const GammaQ& b, double t, double support) {
  if (!std::isfinite(t) || !(t > 0.0 && t < support))
    throw std::domain_error("q_expected_log_beta: lag outside (0, T0)");
  const double x = t / support;
  return taylor_elbo_bound(a, b) + (a.mean() - 1.0) * std::log(x) + (b.mean() - 1.0) * std::log1p(-x) -
         std::log(support);
}

void SviConfig::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("SviConfig: kappa must be in (0, 1]");
  if (!(rho0 > 0.0)) throw std::invalid_argument("SviConfig: rho0 must be positive");
  if (!(tau1 >= 0.0)) throw std::invalid_argument("SviConfig: tau1 must be >= 0");
  if (!batch && !(tau2 > 0.5 && tau2 <= 1.0)) throw std::invalid_argument("SviConfig: tau2 must be in (0.5, 1]");
  if (iterations < 1) throw std::invalid_argument("SviConfig: iterations must be >= 1");
  if (h0 < 1 || h < 1) throw std::invalid_argument("SviConfig: truncations must be >= 1");
  if (elbo_every < 1) throw std::invalid_argument("SviConfig: elbo_every must be >= 1");
  if (!(support > 0.0)) throw std::invalid_argument("SviConfig: support must be positive");
  hyper.validate();
}

double learning_rate(int r, const SviConfig& cfg) {
  if (r < 1) throw std::invalid_argument("learning_rate: r must be >= 1");
  if (cfg.batch) return 1.0;
  return cfg.rho0 * std::pow(r + cfg.tau1, -cfg.tau2);
}

void VariationalState::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto check = [&](const std::vector<GammaQ>& v) {
    for (const auto& g : v)
      if (!pos(g.shape) || !pos(g.rate)) throw std::logic_error("VariationalState: non-positive Gamma parameter");
  };
  check(mu);
  check(alpha);
  check(a0);
  check(b0);
  check(ai);
  check(bi);
  for (double v : p0)
    if (!pos(v)) throw std::logic_error("VariationalState: non-positive Dirichlet parameter");
  for (const auto& w : pi)
    for (double v : w)
      if (!pos(v)) throw std::logic_error("VariationalState: non-positive Dirichlet parameter");
  if (!pos(eps1) || !pos(eps2)) throw std::logic_error("VariationalState: non-positive Beta parameter");
}

VariationalState initial_variational(const SviConfig& cfg, const EventSequence& seq, Rng& rng) {
  cfg.validate();
  VariationalState s;
  s.k = seq.num_dims();
  s.h0 = cfg.h0;
  s.h = cfg.h;
  s.support = cfg.support;
  s.variant = cfg.variant;
  constexpr double shape = 2.0;
  auto with_mean = [&](double m) { return GammaQ{shape, shape / m}; };
  const auto n = seq.counts();
  for (int d = 0; d < s.k; ++d)
    s.mu.push_back(with_mean(static_cast<double>(std::max<std::size_t>(n[d], 1)) / (2.0 * seq.horizon())));
  s.alpha.assign(static_cast<std::size_t>(s.k) * s.k, with_mean(0.5 / s.k));
  auto prior_mean = [&](double c, double d) { return with_mean(std::clamp(gamma_draw(rng, c, d), 0.1, 20.0)); };
  for (int c = 0; c < s.h0; ++c) {
    s.a0.push_back(prior_mean(cfg.hyper.common.a_shape, cfg.hyper.common.a_rate));
    s.b0.push_back(prior_mean(cfg.hyper.common.b_shape, cfg.hyper.common.b_rate));
  }
  for (int q = 0; q < s.k * s.k * s.h; ++q) {
    s.ai.push_back(prior_mean(cfg.hyper.idio.a_shape, cfg.hyper.idio.a_rate));
    s.bi.push_back(prior_mean(cfg.hyper.idio.b_shape, cfg.hyper.idio.b_rate));
  }
  s.p0.assign(s.h0, 1.0);
  s.pi.assign(static_cast<std::size_t>(s.k) * s.k, std::vector<double>(s.h, 1.0));
  s.eps1 = s.eps2 = 2.0;
  return s;
}

Window select_window(const EventSequence& seq, double kappa, Rng& rng) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("select_window: kappa must be in (0, 1]");
  if (kappa == 1.0) return full_window(seq);
  const double len = kappa * seq.horizon();
  const double t0 = uniform01(rng) * (seq.horizon() - len);
  const auto times = seq.times();
  Window w;
  w.t_start = t0;
  w.t_end = t0 + len;
  w.begin = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), w.t_start) - times.begin());
  w.end = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), w.t_end) - times.begin());
  return w;
}

Window full_window(const EventSequence& seq) { return {0.0, seq.horizon(), 0, seq.size()}; }

std::vector<HawkesParams> sample_from_variational(const VariationalState& s, std::size_t n_draws, Rng& rng) {
  std::vector<HawkesParams> out;
  out.reserve(n_draws);
  for (std::size_t r = 0; r < n_draws; ++r) {
    HawkesParams p;
    for (const auto& g : s.mu) p.mu.push_back(gamma_draw(rng, g.shape, g.rate));
    p.alpha.resize(s.k, s.k);
    for (int d = 0; d < s.k; ++d)
      for (int l = 0; l < s.k; ++l) {
        const GammaQ& g = s.alpha[static_cast<std::size_t>(d) * s.k + l];
        p.alpha(d, l) = gamma_draw(rng, g.shape, g.rate);
      }
    auto& ex = p.excitation;
    ex.num_dims = s.k;
    ex.support = s.support;
    ex.eps = s.variant == Variant::Random ? beta_draw(rng, s.eps1, s.eps2) : (s.variant == Variant::Idio ? 0.0 : 1.0);
    ex.common.weights = dirichlet_draw(rng, s.p0);
    for (int c = 0; c < s.h0; ++c) {
      ex.common.a.push_back(gamma_draw(rng, s.a0[c].shape, s.a0[c].rate));
      ex.common.b.push_back(gamma_draw(rng, s.b0[c].shape, s.b0[c].rate));
    }
    for (int pair = 0; pair < s.k * s.k; ++pair) {
      BetaMixture m;
      m.weights = dirichlet_draw(rng, s.pi[pair]);
      for (int c = 0; c < s.h; ++c) {
        const std::size_t q = static_cast<std::size_t>(pair) * s.h + c;
        m.a.push_back(gamma_draw(rng, s.ai[q].shape, s.ai[q].rate));
        m.b.push_back(gamma_draw(rng, s.bi[q].shape, s.bi[q].rate));
      }
      ex.idio.push_back(std::move(m));
    }
    out.push_back(std::move(p));
  }
  return out;
}

HawkesParams variational_mean(const VariationalState& s) {
  HawkesParams p;
  for (const auto& g : s.mu) p.mu.push_back(g.mean());
  p.alpha.resize(s.k, s.k);
  for (int d = 0; d < s.k; ++d)
    for (int l = 0; l < s.k; ++l) p.alpha(d, l) = s.alpha[static_cast<std::size_t>(d) * s.k + l].mean();
  auto& ex = p.excitation;
  ex.num_dims = s.k;
  ex.support = s.support;
  ex.eps = s.variant == Variant::Random ? s.eps1 / (s.eps1 + s.eps2) : (s.variant == Variant::Idio ? 0.0 : 1.0);
  auto normalize = [](const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x;
    std::vector<double> out;
    for (double x : v) out.push_back(x / t);
    return out;
  };
  ex.common.weights = normalize(s.p0);
  for (int c = 0; c < s.h0; ++c) {
    ex.common.a.push_back(s.a0[c].mean());
    ex.common.b.push_back(s.b0[c].mean());
  }
  for (int pair = 0; pair < s.k * s.k; ++pair) {
    BetaMixture m;
    m.weights = normalize(s.pi[pair]);
    for (int c = 0; c < s.h; ++c) {
      const std::size_t q = static_cast<std::size_t>(pair) * s.h + c;
      m.a.push_back(s.ai[q].mean());
      m.b.push_back(s.bi[q].mean());
    }
    ex.idio.push_back(std::move(m));
  }
  return p;
}

}  // namespace hawkes
