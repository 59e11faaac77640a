#include "hawkes/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hawkes/kernels.hpp"

namespace hawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

/// log(blend * p_h) + log normalizer - log T0 for every allocation target of
/// every pair: H0 common entries followed by H idiosyncratic ones.
struct AllocTable {
  int k, h0, h;
  std::vector<double> coef, am1, bm1;  // per pair, H0 + H entries

  explicit AllocTable(const HawkesParams& p)
      : k(p.num_dims()),
        h0(static_cast<int>(p.excitation.common.size())),
        h(static_cast<int>(p.excitation.idio.front().size())) {
    const auto& ex = p.excitation;
    const double log_t0 = std::log(ex.support);
    const double le = safe_log(ex.eps);
    const double l1e = safe_log(1.0 - ex.eps);
    const std::size_t w = static_cast<std::size_t>(h0 + h);
    coef.resize(w * k * k);
    am1.resize(coef.size());
    bm1.resize(coef.size());
    for (int pair = 0; pair < k * k; ++pair) {
      const std::size_t base = pair * w;
      for (int c = 0; c < h0; ++c) {
        const auto& m = ex.common;
        coef[base + c] = le + safe_log(m.weights[c]) + log_beta_norm(m.a[c], m.b[c]) - log_t0;
        am1[base + c] = m.a[c] - 1.0;
        bm1[base + c] = m.b[c] - 1.0;
      }
      const auto& m = ex.idio[pair];
      for (int c = 0; c < h; ++c) {
        coef[base + h0 + c] = l1e + safe_log(m.weights[c]) + log_beta_norm(m.a[c], m.b[c]) - log_t0;
        am1[base + h0 + c] = m.a[c] - 1.0;
        bm1[base + h0 + c] = m.b[c] - 1.0;
      }
    }
  }

  void weights(int parent, int child, double lag, double support, std::vector<double>& out) const {
    const std::size_t w = static_cast<std::size_t>(h0 + h);
    const std::size_t base = (static_cast<std::size_t>(parent) * k + child) * w;
    out.resize(w);
    const double lx = std::log(lag / support);
    const double l1x = std::log1p(-lag / support);
    for (std::size_t c = 0; c < w; ++c)
      out[c] = coef[base + c] == kNegInf ? kNegInf : coef[base + c] + am1[base + c] * lx + bm1[base + c] * l1x;
  }
};

}  // namespace

void McmcConfig::validate() const {
  if (iterations < 1 || burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("McmcConfig: need 0 <= burn_in < iterations");
  if (h0 < 1 || h < 1) throw std::invalid_argument("McmcConfig: truncations must be >= 1");
  if (!(mh_step > 0.0)) throw std::invalid_argument("McmcConfig: mh_step must be positive");
  if (!(support > 0.0)) throw std::invalid_argument("McmcConfig: support must be positive");
  if (thin < 1) throw std::invalid_argument("McmcConfig: thin must be >= 1");
  hyper.validate();
}

double SuffStats::total_common() const {
  double s = 0.0;
  for (double v : n0) s += v;
  return s;
}

double SuffStats::total_idio() const {
  double s = 0.0;
  for (double v : ni) s += v;
  return s;
}

SuffStats sufficient_stats(const EventSequence& seq, const LatentState& latent, int h0, int h,
                           double support) {
  SuffStats st;
  st.k = seq.num_dims();
  st.h0 = h0;
  st.h = h;
  st.immigrants.assign(st.k, 0.0);
  st.offspring = Eigen::MatrixXd::Zero(st.k, st.k);
  st.n0.assign(h0, 0.0);
  st.s0a.assign(h0, 0.0);
  st.s0b.assign(h0, 0.0);
  const std::size_t ni = static_cast<std::size_t>(st.k) * st.k * h;
  st.ni.assign(ni, 0.0);
  st.sia.assign(ni, 0.0);
  st.sib.assign(ni, 0.0);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const int c = seq.dim(j);
    const auto p = latent.parent[j];
    if (p == kImmigrant) {
      st.immigrants[c] += 1.0;
      continue;
    }
    const auto i = static_cast<std::size_t>(p);
    const int d = seq.dim(i);
    st.offspring(d, c) += 1.0;
    const double x = (seq.time(j) - seq.time(i)) / support;
    const double lx = std::log(x), l1x = std::log1p(-x);
    const Allocation& al = latent.alloc[j];
    if (al.source == Source::Common) {
      st.n0[al.component] += 1.0;
      st.s0a[al.component] += lx;
      st.s0b[al.component] += l1x;
    } else {
      const std::size_t q = st.idx(d, c, al.component);
      st.ni[q] += 1.0;
      st.sia[q] += lx;
      st.sib[q] += l1x;
    }
  }
  return st;
}

RateConditionals rate_conditionals(const SuffStats& st, const EventSequence& seq,
                                   const HawkesParams& params, const Hyperparams& hyper,
                                   Compensator mode) {
  const int k = st.k;
  RateConditionals rc;
  for (int l = 0; l < k; ++l)
    rc.mu.push_back({hyper.mu_shape + st.immigrants[l], hyper.mu_rate + seq.horizon()});
  Eigen::MatrixXd exposure = Eigen::MatrixXd::Zero(k, k);
  const auto n = seq.counts();
  for (int d = 0; d < k; ++d)
    for (int l = 0; l < k; ++l) exposure(d, l) = static_cast<double>(n[d]);
  if (mode == Compensator::Exact) {
    const double t0 = params.support();
    for (std::size_t i = seq.size(); i-- > 0;) {
      const double rem = seq.horizon() - seq.time(i);
      if (rem >= t0) break;
      const int d = seq.dim(i);
      for (int l = 0; l < k; ++l) exposure(d, l) -= 1.0 - excitation_cdf(params.excitation, d, l, rem);
    }
  }
  for (int d = 0; d < k; ++d)
    for (int l = 0; l < k; ++l)
      rc.alpha.push_back({hyper.alpha_shape + st.offspring(d, l), hyper.alpha_rate + exposure(d, l)});
  return rc;
}

WeightConditionals weight_conditionals(const SuffStats& st, const Hyperparams& hyper) {
  WeightConditionals wc;
  for (int c = 0; c < st.h0; ++c) wc.common.push_back(hyper.concentration / st.h0 + st.n0[c]);
  for (int pair = 0; pair < st.k * st.k; ++pair) {
    std::vector<double> v;
    for (int c = 0; c < st.h; ++c)
      v.push_back(hyper.concentration / st.h + st.ni[static_cast<std::size_t>(pair) * st.h + c]);
    wc.idio.push_back(std::move(v));
  }
  wc.eps_a = 1.0 + st.total_common();
  wc.eps_b = 1.0 + st.total_idio();
  return wc;
}

double shape_log_target(double a, double b, double n, double sa, double sb, const ShapePrior& prior,
                        double support) {
  if (!(a > 0.0) || !(b > 0.0)) return kNegInf;
  return n * (log_beta_norm(a, b) - std::log(support)) + (a - 1.0) * sa + (b - 1.0) * sb +
         (prior.a_shape - 1.0) * std::log(a) - prior.a_rate * a + (prior.b_shape - 1.0) * std::log(b) -
         prior.b_rate * b;
}

double mh_log_ratio(double a, double b, double proposed, bool which_b, double n, double sa, double sb,
                    const ShapePrior& prior, double support) {
  const double cur = shape_log_target(a, b, n, sa, sb, prior, support);
  if (which_b)
    return shape_log_target(a, proposed, n, sa, sb, prior, support) - cur + std::log(proposed / b);
  return shape_log_target(proposed, b, n, sa, sb, prior, support) - cur + std::log(proposed / a);
}

void branching_log_weights(const HawkesParams& params, const CompiledExcitation& ex,
                           const EventSequence& seq, const ParentWindows& win, std::size_t j,
                           std::vector<double>& out) {
  const int c = seq.dim(j);
  const double tj = seq.time(j);
  out.resize(1 + win.count(j));
  out[0] = std::log(params.mu[c]);
  for (std::size_t i = win.begin(j), q = 1; i < j; ++i, ++q) {
    const int d = seq.dim(i);
    out[q] = safe_log(params.alpha(d, c) * ex.density(d, c, tj - seq.time(i)));
  }
}

void allocation_log_weights(const HawkesParams& params, int parent, int child, double lag,
                            std::vector<double>& out) {
  if (!(lag > 0.0 && lag < params.support()))
    throw std::domain_error("allocation_log_weights: lag outside (0, T0)");
  AllocTable(params).weights(parent, child, lag, params.support(), out);
}

McmcState initial_state(const McmcConfig& cfg, const EventSequence& seq, Rng& rng) {
  const int k = seq.num_dims();
  McmcState s;
  const auto n = seq.counts();
  for (int d = 0; d < k; ++d)
    s.params.mu.push_back(static_cast<double>(std::max<std::size_t>(n[d], 1)) / (2.0 * seq.horizon()));
  s.params.alpha = Eigen::MatrixXd::Constant(k, k, 0.5 / k);
  auto& ex = s.params.excitation;
  ex.num_dims = k;
  ex.support = cfg.support;
  ex.eps = cfg.variant == Variant::Random ? 0.5 : (cfg.variant == Variant::Idio ? 0.0 : 1.0);
  auto draw_mixture = [&](int size, const ShapePrior& pr) {
    BetaMixture m;
    m.weights.assign(size, 1.0 / size);
    for (int c = 0; c < size; ++c) {
      m.a.push_back(gamma_draw(rng, pr.a_shape, pr.a_rate));
      m.b.push_back(gamma_draw(rng, pr.b_shape, pr.b_rate));
    }
    return m;
  };
  ex.common = draw_mixture(cfg.h0, cfg.hyper.common);
  for (int pair = 0; pair < k * k; ++pair) ex.idio.push_back(draw_mixture(cfg.h, cfg.hyper.idio));
  s.latent = LatentState::all_immigrants(seq.size());
  return s;
}

void sample_branching(McmcState& s, const EventSequence& seq, const ParentWindows& win, Rng& rng) {
  const CompiledExcitation ex(s.params.excitation);
  std::vector<double> w;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    if (win.count(j) == 0) {
      s.latent.parent[j] = kImmigrant;
      continue;
    }
    branching_log_weights(s.params, ex, seq, win, j, w);
    const std::size_t q = categorical_log(rng, w);
    s.latent.parent[j] = q == 0 ? kImmigrant : static_cast<std::ptrdiff_t>(win.begin(j) + q - 1);
  }
}

void sample_allocations(McmcState& s, const EventSequence& seq, Variant variant, Rng& rng) {
  if (variant == Variant::Idio) s.params.excitation.eps = 0.0;
  if (variant == Variant::Common) s.params.excitation.eps = 1.0;
  const AllocTable table(s.params);
  std::vector<double> w;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto p = s.latent.parent[j];
    if (p == kImmigrant) continue;
    const auto i = static_cast<std::size_t>(p);
    table.weights(seq.dim(i), seq.dim(j), seq.time(j) - seq.time(i), s.params.support(), w);
    const auto q = static_cast<int>(categorical_log(rng, w));
    s.latent.alloc[j] = q < table.h0 ? Allocation{Source::Common, q}
                                     : Allocation{Source::Idiosyncratic, q - table.h0};
  }
}

void sample_rates(McmcState& s, const EventSequence& seq, const SuffStats& st,
                  const Hyperparams& hyper, Compensator mode, Rng& rng) {
  const RateConditionals rc = rate_conditionals(st, seq, s.params, hyper, mode);
  const int k = st.k;
  for (int l = 0; l < k; ++l) s.params.mu[l] = gamma_draw(rng, rc.mu[l].shape, rc.mu[l].rate);
  for (int d = 0; d < k; ++d)
    for (int l = 0; l < k; ++l) {
      const GammaParams& g = rc.alpha[static_cast<std::size_t>(d) * k + l];
      s.params.alpha(d, l) = gamma_draw(rng, g.shape, g.rate);
    }
}

ShapeAcceptance sample_shapes(McmcState& s, const SuffStats& st, const Hyperparams& hyper,
                              std::span<const double> steps, Rng& rng,
                              std::vector<unsigned char>* accepted) {
  ShapeAcceptance acc;
  auto& ex = s.params.excitation;
  const double t0 = ex.support;
  std::size_t slot = 0;
  if (accepted) accepted->assign(steps.size(), 0);
  auto move = [&](double& a, double& b, double n, double sa, double sb, const ShapePrior& pr) {
    for (int which = 0; which < 2; ++which, ++slot) {
      double& cur = which ? b : a;
      const double prop = cur * std::exp(steps[slot] * normal01(rng));
      const double lr = mh_log_ratio(a, b, prop, which == 1, n, sa, sb, pr, t0);
      ++acc.proposed;
      if (std::log(uniform01(rng)) < lr) {
        cur = prop;
        ++acc.accepted;
        if (accepted) (*accepted)[slot] = 1;
      }
    }
  };
  for (int c = 0; c < st.h0; ++c)
    move(ex.common.a[c], ex.common.b[c], st.n0[c], st.s0a[c], st.s0b[c], hyper.common);
  for (int d = 0; d < st.k; ++d)
    for (int l = 0; l < st.k; ++l) {
      BetaMixture& m = ex.idio_at(d, l);
      for (int c = 0; c < st.h; ++c) {
        const std::size_t q = st.idx(d, l, c);
        move(m.a[c], m.b[c], st.ni[q], st.sia[q], st.sib[q], hyper.idio);
      }
    }
  return acc;
}

void sample_weights(McmcState& s, const SuffStats& st, const Hyperparams& hyper, Variant variant,
                    Rng& rng) {
  const WeightConditionals wc = weight_conditionals(st, hyper);
  auto& ex = s.params.excitation;
  ex.common.weights = dirichlet_draw(rng, wc.common);
  for (std::size_t pair = 0; pair < wc.idio.size(); ++pair) ex.idio[pair].weights = dirichlet_draw(rng, wc.idio[pair]);
  if (variant == Variant::Random) ex.eps = beta_draw(rng, wc.eps_a, wc.eps_b);
}

double PosteriorSamples::mean_loglik() const {
  if (loglik.empty()) return kNegInf;
  double s = 0.0;
  for (double v : loglik) s += v;
  return s / static_cast<double>(loglik.size());
}

PosteriorSamples run_chain(const McmcConfig& cfg, const EventSequence& seq) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Rng rng = make_rng(cfg.seed, 0);
  McmcState s = initial_state(cfg, seq, rng);
  const ParentWindows win(seq, cfg.support);
  const std::size_t nshape = 2 * (static_cast<std::size_t>(cfg.h0) +
                                  static_cast<std::size_t>(seq.num_dims()) * seq.num_dims() * cfg.h);
  std::vector<double> steps(nshape, cfg.mh_step);
  std::vector<unsigned char> accepted;
  PosteriorSamples out;
  for (int it = 0; it < cfg.iterations; ++it) {
    sample_branching(s, seq, win, rng);
    sample_allocations(s, seq, cfg.variant, rng);
    const SuffStats st = sufficient_stats(seq, s.latent, cfg.h0, cfg.h, cfg.support);
    sample_rates(s, seq, st, cfg.hyper, cfg.compensator, rng);
    const ShapeAcceptance a = sample_shapes(s, st, cfg.hyper, steps, rng, cfg.adapt ? &accepted : nullptr);
    out.shape_moves.proposed += a.proposed;
    out.shape_moves.accepted += a.accepted;
    sample_weights(s, st, cfg.hyper, cfg.variant, rng);
    if (cfg.adapt && it < cfg.burn_in) {
      const double gain = std::pow(it + 1.0, -0.6);
      for (std::size_t q = 0; q < nshape; ++q)
        steps[q] = std::clamp(steps[q] * std::exp(gain * (accepted[q] - cfg.target_accept)), 1e-3, 5.0);
    }
    if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      out.draws.push_back(s.params);
      out.loglik.push_back(log_likelihood_serial(s.params, seq, cfg.compensator));
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::size_t select_best_restart(const std::vector<PosteriorSamples>& runs) {
  if (runs.empty()) throw std::invalid_argument("select_best_restart: no runs");
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].mean_loglik() > runs[best].mean_loglik()) best = r;
  return best;
}

}  // namespace hawkes
