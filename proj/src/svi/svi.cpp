#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "hawkes/kernels.hpp"
#include "hawkes/svi.hpp"

namespace hawkes {

using boost::math::digamma;
using boost::math::trigamma;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kFloor = 1e-10;

double dirichlet_mean_log(const std::vector<double>& eta, std::size_t h) {
  double s = 0.0;
  for (double v : eta) s += v;
  return digamma(eta[h]) - digamma(s);
}

/// Per pair, H0 + H entries of E log pi + TB - log T0 and the lag exponents,
/// so that the allocation log weight of lag x is coef + am1 log(x/T0) + bm1 log(1-x/T0).
struct QTable {
  int k, h0, h, width;
  std::vector<double> coef, am1, bm1;
  std::vector<double> elog_mu, elog_alpha;

  explicit QTable(const VariationalState& s) : k(s.k), h0(s.h0), h(s.h), width(s.h0 + s.h) {
    const double log_t0 = std::log(s.support);
    double le = 0.0, l1e = 0.0;
    if (s.variant == Variant::Random) {
      const double ps = digamma(s.eps1 + s.eps2);
      le = digamma(s.eps1) - ps;
      l1e = digamma(s.eps2) - ps;
    } else if (s.variant == Variant::Idio) {
      le = kNegInf;
    } else {
      l1e = kNegInf;
    }
    std::vector<double> common(h0), cam(h0), cbm(h0);
    for (int c = 0; c < h0; ++c) {
      common[c] = le == kNegInf ? kNegInf : le + dirichlet_mean_log(s.p0, c) + taylor_elbo_bound(s.a0[c], s.b0[c]) - log_t0;
      cam[c] = s.a0[c].mean() - 1.0;
      cbm[c] = s.b0[c].mean() - 1.0;
    }
    const std::size_t w = width;
    coef.resize(w * k * k);
    am1.resize(coef.size());
    bm1.resize(coef.size());
    for (int pair = 0; pair < k * k; ++pair) {
      const std::size_t base = pair * w;
      for (int c = 0; c < h0; ++c) {
        coef[base + c] = common[c];
        am1[base + c] = cam[c];
        bm1[base + c] = cbm[c];
      }
      for (int c = 0; c < h; ++c) {
        const std::size_t q = static_cast<std::size_t>(pair) * h + c;
        coef[base + h0 + c] =
            l1e == kNegInf ? kNegInf
                           : l1e + dirichlet_mean_log(s.pi[pair], c) + taylor_elbo_bound(s.ai[q], s.bi[q]) - log_t0;
        am1[base + h0 + c] = s.ai[q].mean() - 1.0;
        bm1[base + h0 + c] = s.bi[q].mean() - 1.0;
      }
    }
    for (const auto& g : s.mu) elog_mu.push_back(g.mean_log());
    for (const auto& g : s.alpha) elog_alpha.push_back(g.mean_log());
  }

  /// Fills out with allocation log weights; returns their log-sum-exp.
  double weights(int parent, int child, double x, double* out) const {
    const std::size_t base = (static_cast<std::size_t>(parent) * k + child) * width;
    const double lx = std::log(x), l1x = std::log1p(-x);
    double m = kNegInf;
    for (int c = 0; c < width; ++c) {
      const double cf = coef[base + c];
      out[c] = cf == kNegInf ? kNegInf : cf + am1[base + c] * lx + bm1[base + c] * l1x;
      m = std::max(m, out[c]);
    }
    double s = 0.0;
    for (int c = 0; c < width; ++c) s += std::exp(out[c] - m);
    return m + std::log(s);
  }
};

void layout(const EventSequence& seq, const Window& w, const ParentWindows& win, int width, LocalState& out) {
  out.window = w;
  out.width = width;
  const std::size_t n = w.size();
  out.first.resize(n);
  out.b_off.resize(n + 1);
  out.b_off[0] = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t j = w.begin + u;
    out.first[u] = std::max(win.begin(j), w.begin);
    out.b_off[u + 1] = out.b_off[u] + 1 + (j - out.first[u]);
  }
  out.eta_b.assign(out.b_off[n], 0.0);
  out.eta_wz.assign((out.b_off[n] - n) * static_cast<std::size_t>(width), 0.0);
  (void)seq;
}

void local_event(const QTable& qt, const EventSequence& seq, double support, LocalState& loc, std::size_t u) {
  const std::size_t j = loc.window.begin + u;
  const int c = seq.dim(j);
  const std::size_t nc = loc.n_cand(u);
  double* eb = loc.eta_b.data() + loc.b_off[u];
  eb[0] = qt.elog_mu[c];
  for (std::size_t q = 0; q < nc; ++q) {
    const std::size_t i = loc.first[u] + q;
    const int d = seq.dim(i);
    double* wz = loc.eta_wz.data() + loc.pair(u, q) * loc.width;
    const double lse = qt.weights(d, c, (seq.time(j) - seq.time(i)) / support, wz);
    for (int h = 0; h < loc.width; ++h) wz[h] = std::exp(wz[h] - lse);
    // Sum eta (w - log eta) over the allocation block equals lse exactly.
    eb[1 + q] = qt.elog_alpha[static_cast<std::size_t>(d) * qt.k + c] + lse;
  }
  double m = kNegInf;
  for (std::size_t q = 0; q <= nc; ++q) m = std::max(m, eb[q]);
  double s = 0.0;
  for (std::size_t q = 0; q <= nc; ++q) s += std::exp(eb[q] - m);
  const double lse = m + std::log(s);
  for (std::size_t q = 0; q <= nc; ++q) eb[q] = std::exp(eb[q] - lse);
}

GammaQ blend(const GammaQ& old, double shape, double rate, double rho, std::uint64_t& clamps) {
  GammaQ g{(1.0 - rho) * old.shape + rho * shape, (1.0 - rho) * old.rate + rho * rate};
  if (!(g.shape >= kFloor) || !(g.rate >= kFloor)) {
    if (clamps++ == 0) std::clog << "warning: variational Gamma parameter clamped at 1e-10\n";
    g.shape = std::max(g.shape, kFloor);
    g.rate = std::max(g.rate, kFloor);
  }
  return g;
}

double mix(double old, double target, double rho) { return (1.0 - rho) * old + rho * target; }

double gamma_log_prior(const GammaQ& q, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * q.mean_log() - rate * q.mean();
}

/// E_q log Dir(p | conc) + H[q] for a symmetric prior with total mass gamma.
double dirichlet_terms(const std::vector<double>& eta, double gamma) {
  const auto n = static_cast<double>(eta.size());
  double tot = 0.0;
  for (double v : eta) tot += v;
  const double psi_tot = digamma(tot);
  double prior = std::lgamma(gamma) - n * std::lgamma(gamma / n);
  double ent = -std::lgamma(tot) + (tot - n) * psi_tot;
  for (double v : eta) {
    const double el = digamma(v) - psi_tot;
    prior += (gamma / n - 1.0) * el;
    ent += std::lgamma(v) - (v - 1.0) * digamma(v);
  }
  return prior + ent;
}

}  // namespace

void update_local(const VariationalState& s, const EventSequence& seq, const Window& w,
                  const ParentWindows& win, LocalState& out) {
  const QTable qt(s);
  layout(seq, w, win, qt.width, out);
  const auto n = static_cast<std::ptrdiff_t>(w.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t u = 0; u < n; ++u) local_event(qt, seq, s.support, out, static_cast<std::size_t>(u));
}

void update_local_serial(const VariationalState& s, const EventSequence& seq, const Window& w,
                         const ParentWindows& win, LocalState& out) {
  const QTable qt(s);
  layout(seq, w, win, qt.width, out);
  for (std::size_t u = 0; u < w.size(); ++u) local_event(qt, seq, s.support, out, u);
}

WindowStats window_stats(const VariationalState& s, const EventSequence& seq, const LocalState& loc,
                         double kappa) {
  const int k = s.k;
  const std::size_t kk = static_cast<std::size_t>(k) * k;
  WindowStats st;
  st.immigrants.assign(k, 0.0);
  st.offspring.assign(kk, 0.0);
  st.events.assign(k, 0.0);
  st.n0.assign(s.h0, 0.0);
  st.s0a.assign(s.h0, 0.0);
  st.s0b.assign(s.h0, 0.0);
  st.ni.assign(kk * s.h, 0.0);
  st.sia.assign(kk * s.h, 0.0);
  st.sib.assign(kk * s.h, 0.0);
  const double scale = 1.0 / kappa;
  for (std::size_t u = 0; u < loc.window.size(); ++u) {
    const std::size_t j = loc.window.begin + u;
    const int c = seq.dim(j);
    const double* eb = loc.eta_b.data() + loc.b_off[u];
    st.events[c] += scale;
    st.immigrants[c] += scale * eb[0];
    for (std::size_t q = 0; q < loc.n_cand(u); ++q) {
      const std::size_t i = loc.first[u] + q;
      const int d = seq.dim(i);
      const double pb = scale * eb[1 + q];
      st.offspring[static_cast<std::size_t>(d) * k + c] += pb;
      const double x = (seq.time(j) - seq.time(i)) / s.support;
      const double lx = std::log(x), l1x = std::log1p(-x);
      const double* wz = loc.eta_wz.data() + loc.pair(u, q) * loc.width;
      for (int h = 0; h < s.h0; ++h) {
        const double w = pb * wz[h];
        st.n0[h] += w;
        st.s0a[h] += w * lx;
        st.s0b[h] += w * l1x;
      }
      for (int h = 0; h < s.h; ++h) {
        const double w = pb * wz[s.h0 + h];
        const std::size_t idx = s.idx(d, c, h);
        st.ni[idx] += w;
        st.sia[idx] += w * lx;
        st.sib[idx] += w * l1x;
      }
    }
  }
  return st;
}

void update_rates(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double horizon,
                  double rho) {
  for (int l = 0; l < s.k; ++l)
    s.mu[l] = blend(s.mu[l], hyper.mu_shape + st.immigrants[l], hyper.mu_rate + horizon, rho, s.clamp_events);
  for (int d = 0; d < s.k; ++d)
    for (int l = 0; l < s.k; ++l) {
      const std::size_t q = static_cast<std::size_t>(d) * s.k + l;
      s.alpha[q] = blend(s.alpha[q], hyper.alpha_shape + st.offspring[q], hyper.alpha_rate + st.events[d], rho,
                         s.clamp_events);
    }
}

void update_weights(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double rho) {
  for (int c = 0; c < s.h0; ++c) s.p0[c] = mix(s.p0[c], hyper.concentration / s.h0 + st.n0[c], rho);
  for (std::size_t pair = 0; pair < s.pi.size(); ++pair)
    for (int c = 0; c < s.h; ++c)
      s.pi[pair][c] = mix(s.pi[pair][c], hyper.concentration / s.h + st.ni[pair * s.h + c], rho);
}

void update_blend(VariationalState& s, const WindowStats& st, double rho) {
  if (s.variant != Variant::Random) return;
  double n0 = 0.0, ni = 0.0;
  for (double v : st.n0) n0 += v;
  for (double v : st.ni) ni += v;
  s.eps1 = mix(s.eps1, 1.0 + n0, rho);
  s.eps2 = mix(s.eps2, 1.0 + ni, rho);
}

void update_shapes(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double rho) {
  auto step = [&](GammaQ& a, GammaQ& b, double n, double sa, double sb, const ShapePrior& pr) {
    const double am = a.mean(), bm = b.mean();
    const double psi_ab = digamma(am + bm);
    const double cross = am * bm * trigamma(am + bm);
    const double da = a.mean_log() - std::log(am);
    const double db = b.mean_log() - std::log(bm);
    const double a_shape = pr.a_shape + n * (am * (psi_ab - digamma(am)) + cross * db);
    const double b_shape = pr.b_shape + n * (bm * (psi_ab - digamma(bm)) + cross * da);
    const GammaQ na = blend(a, a_shape, pr.a_rate - sa, rho, s.clamp_events);
    const GammaQ nb = blend(b, b_shape, pr.b_rate - sb, rho, s.clamp_events);
    a = na;
    b = nb;
  };
  for (int c = 0; c < s.h0; ++c) step(s.a0[c], s.b0[c], st.n0[c], st.s0a[c], st.s0b[c], hyper.common);
  for (std::size_t q = 0; q < s.ai.size(); ++q) step(s.ai[q], s.bi[q], st.ni[q], st.sia[q], st.sib[q], hyper.idio);
}

void update_global(VariationalState& s, const WindowStats& st, const Hyperparams& hyper, double horizon,
                   double rho) {
  update_rates(s, st, hyper, horizon, rho);
  update_weights(s, st, hyper, rho);
  update_blend(s, st, rho);
  update_shapes(s, st, hyper, rho);
}

double elbo(const VariationalState& s, const LocalState& loc, const EventSequence& seq, const Hyperparams& hyper) {
  if (loc.window.begin != 0 || loc.window.end != seq.size())
    throw std::invalid_argument("elbo: local factors must cover the whole sequence");
  const QTable qt(s);
  std::vector<double> w(qt.width);
  double local = 0.0;
  for (std::size_t u = 0; u < loc.window.size(); ++u) {
    const std::size_t j = u;
    const int c = seq.dim(j);
    const double* eb = loc.eta_b.data() + loc.b_off[u];
    auto ent = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
    local += eb[0] * qt.elog_mu[c] + ent(eb[0]);
    for (std::size_t q = 0; q < loc.n_cand(u); ++q) {
      const double pb = eb[1 + q];
      local += ent(pb);
      if (pb == 0.0) continue;
      const std::size_t i = loc.first[u] + q;
      const int d = seq.dim(i);
      qt.weights(d, c, (seq.time(j) - seq.time(i)) / s.support, w.data());
      const double* wz = loc.eta_wz.data() + loc.pair(u, q) * loc.width;
      double inner = qt.elog_alpha[static_cast<std::size_t>(d) * s.k + c];
      for (int h = 0; h < qt.width; ++h)
        if (wz[h] > 0.0) inner += wz[h] * (w[h] - std::log(wz[h]));
      local += pb * inner;
    }
  }
  double global = 0.0;
  const auto n = seq.counts();
  for (int l = 0; l < s.k; ++l) {
    global -= s.mu[l].mean() * seq.horizon();
    global += gamma_log_prior(s.mu[l], hyper.mu_shape, hyper.mu_rate) + s.mu[l].entropy();
  }
  for (int d = 0; d < s.k; ++d)
    for (int l = 0; l < s.k; ++l) {
      const GammaQ& g = s.alpha[static_cast<std::size_t>(d) * s.k + l];
      global -= g.mean() * static_cast<double>(n[d]);
      global += gamma_log_prior(g, hyper.alpha_shape, hyper.alpha_rate) + g.entropy();
    }
  global += dirichlet_terms(s.p0, hyper.concentration);
  for (const auto& p : s.pi) global += dirichlet_terms(p, hyper.concentration);
  if (s.variant == Variant::Random) {
    // Beta(1, 1) prior contributes zero; entropy of the Beta factor.
    global += dirichlet_terms({s.eps1, s.eps2}, 2.0);
  }
  auto shapes = [&](const GammaQ& a, const GammaQ& b, const ShapePrior& pr) {
    return gamma_log_prior(a, pr.a_shape, pr.a_rate) + a.entropy() + gamma_log_prior(b, pr.b_shape, pr.b_rate) +
           b.entropy();
  };
  for (int c = 0; c < s.h0; ++c) global += shapes(s.a0[c], s.b0[c], hyper.common);
  for (std::size_t q = 0; q < s.ai.size(); ++q) global += shapes(s.ai[q], s.bi[q], hyper.idio);
  return local + global;
}

double elbo_full(const VariationalState& s, const EventSequence& seq, const Hyperparams& hyper) {
  const ParentWindows win(seq, s.support);
  LocalState loc;
  update_local(s, seq, full_window(seq), win, loc);
  return elbo(s, loc, seq, hyper);
}

SviResult run_svi(const SviConfig& cfg, const EventSequence& seq) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng = make_rng(cfg.seed, 0);
  SviResult res;
  res.state = initial_variational(cfg, seq, rng);
  const ParentWindows win(seq, cfg.support);
  LocalState loc;
  for (int r = 1; r <= cfg.iterations; ++r) {
    const Window w = select_window(seq, cfg.kappa, rng);
    update_local(res.state, seq, w, win, loc);
    const WindowStats st = window_stats(res.state, seq, loc, cfg.kappa);
    update_global(res.state, st, cfg.hyper, seq.horizon(), learning_rate(r, cfg));
    if (r % cfg.elbo_every == 0 || r == cfg.iterations)
      res.trace.emplace_back(r, elbo_full(res.state, seq, cfg.hyper));
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace hawkes
