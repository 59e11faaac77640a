#include "hawkes/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "hawkes/kernels.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes {

double ExponentialBlend::density(int parent, int child, double lag) const {
  if (lag < 0.0) return 0.0;
  const double r = rate(parent, child);
  return eps * std::exp(-lag) + (1.0 - eps) * r * std::exp(-r * lag);
}

double ExponentialBlend::cdf(int parent, int child, double lag) const {
  if (lag <= 0.0) return 0.0;
  const double r = rate(parent, child);
  return eps * -std::expm1(-lag) + (1.0 - eps) * -std::expm1(-r * lag);
}

double SimScenario::truth_density(int parent, int child, double lag) const {
  if (const auto* m = std::get_if<ExcitationModel>(&excitation))
    return excitation_eval(*m, parent, child, lag);
  return std::get<ExponentialBlend>(excitation).density(parent, child, lag);
}

SimScenario benchmark_scenario(double eps_true, bool exponential, double horizon, std::uint64_t seed) {
  SimScenario sc;
  sc.mu = {0.05, 0.1};
  sc.alpha.resize(2, 2);
  sc.alpha << 0.6, 0.15, 0.3, 0.6;
  sc.horizon = horizon;
  sc.seed = seed;
  if (exponential) {
    ExponentialBlend e;
    e.eps = eps_true;
    e.rate.resize(2, 2);
    e.rate << 2.0, 0.8, 0.8, 2.0;
    sc.excitation = e;
  } else {
    ExcitationModel m;
    m.eps = eps_true;
    m.support = 1.0;
    m.num_dims = 2;
    m.common = BetaMixture::single(1.0, 4.0);
    const double a[4] = {2.0, 4.0, 1.5, 1.0};
    const double b[4] = {6.0, 1.0, 5.0, 1.0};
    for (int p = 0; p < 4; ++p) m.idio.push_back(BetaMixture::single(a[p], b[p]));
    sc.excitation = m;
  }
  return sc;
}

HawkesParams scenario_params(const SimScenario& sc) {
  const auto* m = std::get_if<ExcitationModel>(&sc.excitation);
  if (!m) throw std::invalid_argument("scenario_params: exponential truth is not a model parameter set");
  HawkesParams p{sc.mu, sc.alpha, *m};
  p.validate();
  return p;
}

std::vector<double> expected_rates(const std::vector<double>& mu, const Eigen::MatrixXd& alpha) {
  const auto k = static_cast<Eigen::Index>(mu.size());
  if (alpha.rows() != k || alpha.cols() != k) throw std::invalid_argument("expected_rates: alpha must be K x K");
  if (spectral_radius(alpha) >= 1.0)
    throw std::domain_error("expected_rates: spectral radius >= 1, no stationary rate");
  Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(mu.data(), k);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k) - alpha.transpose();
  const Eigen::VectorXd lam = a.partialPivLu().solve(m);
  return {lam.data(), lam.data() + k};
}

std::vector<double> expected_rates(const HawkesParams& params) {
  return expected_rates(params.mu, params.alpha);
}

namespace {

void check_scenario(const SimScenario& sc) {
  const int k = sc.num_dims();
  if (k < 1) throw std::invalid_argument("scenario: empty mu");
  if (sc.alpha.rows() != k || sc.alpha.cols() != k) throw std::invalid_argument("scenario: alpha must be K x K");
  if (!(sc.horizon > 0.0)) throw std::invalid_argument("scenario: horizon must be positive");
  for (double m : sc.mu)
    if (!(m >= 0.0)) throw std::invalid_argument("scenario: mu must be >= 0");
  if ((sc.alpha.array() < 0.0).any()) throw std::invalid_argument("scenario: alpha must be >= 0");
  if (spectral_radius(sc.alpha) >= 1.0)
    throw std::domain_error("scenario: spectral radius >= 1, refusing to simulate");
  if (const auto* m = std::get_if<ExcitationModel>(&sc.excitation)) {
    m->validate();
    if (m->num_dims != k) throw std::invalid_argument("scenario: excitation K mismatch");
  } else {
    const auto& e = std::get<ExponentialBlend>(sc.excitation);
    if (e.rate.rows() != k || e.rate.cols() != k || (e.rate.array() <= 0.0).any() || e.eps < 0.0 ||
        e.eps > 1.0)
      throw std::invalid_argument("scenario: bad exponential truth");
  }
}

std::size_t pick(Rng& rng, const std::vector<double>& w) {
  const double u = uniform01(rng);
  double c = 0.0;
  for (std::size_t h = 0; h + 1 < w.size(); ++h) {
    c += w[h];
    if (u < c) return h;
  }
  return w.size() - 1;
}

struct Lag {
  double value;
  Allocation alloc;
};

Lag draw_lag(Rng& rng, const TrueExcitation& truth, int parent, int child) {
  if (const auto* m = std::get_if<ExcitationModel>(&truth)) {
    const bool common = uniform01(rng) < m->eps;
    const BetaMixture& mix = common ? m->common : m->idio_at(parent, child);
    const std::size_t h = pick(rng, mix.weights);
    double x;
    do {
      x = beta_draw(rng, mix.a[h], mix.b[h]);
    } while (!(x > 0.0 && x < 1.0));
    return {x * m->support,
            {common ? Source::Common : Source::Idiosyncratic, static_cast<int>(h)}};
  }
  const auto& e = std::get<ExponentialBlend>(truth);
  const bool first = uniform01(rng) < e.eps;
  const double r = first ? 1.0 : e.rate(parent, child);
  return {-std::log(uniform01(rng)) / r, {first ? Source::Common : Source::Idiosyncratic, 0}};
}

struct Node {
  double t;
  int d;
  std::uint64_t key;
  std::size_t parent;  // index into nodes, or npos
  Allocation alloc;
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

}  // namespace

SimulationResult simulate_branching(const SimScenario& sc) {
  check_scenario(sc);
  const int k = sc.num_dims();
  const double horizon = sc.horizon;
  std::vector<Node> nodes;

  Rng imm = make_rng(sc.seed, 0);
  std::uint64_t imm_index = 0;
  for (int d = 0; d < k; ++d) {
    const auto n = poisson_draw(imm, sc.mu[d] * horizon);
    for (std::uint64_t c = 0; c < n; ++c)
      nodes.push_back({uniform01(imm) * horizon, d, stream_seed(sc.seed, ++imm_index), npos, {}});
  }

  // Breadth-first over generations; nodes grows while we iterate.
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const Node parent = nodes[q];
    Rng rng(parent.key);
    std::uint64_t child_index = 0;
    for (int c = 0; c < k; ++c) {
      const double a = sc.alpha(parent.d, c);
      const auto n = poisson_draw(rng, a);
      for (std::uint64_t m = 0; m < n; ++m) {
        const Lag lag = draw_lag(rng, sc.excitation, parent.d, c);
        const std::uint64_t key = stream_seed(parent.key, ++child_index);
        const double t = parent.t + lag.value;
        if (t < horizon && lag.value > 0.0) nodes.push_back({t, c, key, q, lag.alloc});
      }
    }
  }

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return nodes[x].t < nodes[y].t || (nodes[x].t == nodes[y].t && nodes[x].key < nodes[y].key);
  });
  std::vector<std::size_t> rank(nodes.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  std::vector<double> times(nodes.size());
  std::vector<int> dims(nodes.size());
  LatentState latent = LatentState::all_immigrants(nodes.size());
  double prev = -1.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Node& nd = nodes[order[r]];
    double t = nd.t;
    if (t <= prev) t = std::nextafter(prev, horizon + 1.0);
    times[r] = prev = t;
    dims[r] = nd.d;
    if (nd.parent != npos) {
      latent.parent[r] = static_cast<std::ptrdiff_t>(rank[nd.parent]);
      latent.alloc[r] = nd.alloc;
    }
  }
  return {EventSequence(std::move(times), std::move(dims), horizon, k), std::move(latent)};
}

namespace {

/// Upper bound of a Beta(a, b) density (scaled to T0) over lags [x1, x2].
double beta_sup(double a, double b, double support, double x1, double x2) {
  if (a < 1.0 || b < 1.0)
    throw std::domain_error("simulate_thinning: unbounded Beta kernel (shape < 1)");
  const double lo = std::max(x1, 0.0);
  const double hi = std::min(x2, support);
  if (lo >= hi) return 0.0;
  double mode = a + b > 2.0 ? (a - 1.0) / (a + b - 2.0) * support : 0.5 * support;
  mode = std::clamp(mode, lo, hi);
  const double x = std::clamp(mode, support * 1e-300, support * (1.0 - 1e-16));
  double v = beta_pdf(x, a, b, support);
  // Endpoint values for a = 1 or b = 1, where beta_pdf reports 0 at the boundary.
  if (a == 1.0 && mode <= 0.0) v = std::max(v, std::exp(log_beta_norm(a, b)) / support);
  if (b == 1.0 && mode >= support) v = std::max(v, std::exp(log_beta_norm(a, b)) / support);
  return v;
}

struct ThinningKernel {
  const SimScenario& sc;
  double cap = 1.0;  // lags at or beyond cap contribute nothing
  double step = 1.0 / 64.0;

  explicit ThinningKernel(const SimScenario& s) : sc(s) {
    if (const auto* m = std::get_if<ExcitationModel>(&sc.excitation)) {
      cap = m->support;
      step = m->support / 64.0;
    } else {
      // Exponential truth: drop tails below 1e-13 of the kernel at zero lag.
      const auto& e = std::get<ExponentialBlend>(sc.excitation);
      const double rmin = std::min(1.0, e.rate.minCoeff());
      cap = std::log(1e13) / rmin;
      step = 1.0 / 64.0;
    }
  }

  double density(int p, int c, double lag) const {
    if (!(lag > 0.0) || lag >= cap) return 0.0;
    return sc.truth_density(p, c, lag);
  }

  /// Bound of the pair density over lags [x1, x2].
  double sup(int p, int c, double x1, double x2) const {
    if (x1 >= cap) return 0.0;
    if (const auto* m = std::get_if<ExcitationModel>(&sc.excitation)) {
      double s = 0.0;
      if (m->eps > 0.0)
        for (std::size_t h = 0; h < m->common.size(); ++h)
          s += m->eps * m->common.weights[h] * beta_sup(m->common.a[h], m->common.b[h], m->support, x1, x2);
      if (m->eps < 1.0) {
        const BetaMixture& mix = m->idio_at(p, c);
        for (std::size_t h = 0; h < mix.size(); ++h)
          s += (1.0 - m->eps) * mix.weights[h] * beta_sup(mix.a[h], mix.b[h], m->support, x1, x2);
      }
      return s;
    }
    return std::get<ExponentialBlend>(sc.excitation).density(p, c, std::max(x1, 0.0));
  }
};

}  // namespace

EventSequence simulate_thinning(const SimScenario& sc) {
  check_scenario(sc);
  const int k = sc.num_dims();
  const ThinningKernel ker(sc);
  Rng rng = make_rng(sc.seed, 0x7468696eULL);
  std::vector<double> times;
  std::vector<int> dims;
  std::deque<std::size_t> active;  // events with lag < cap from the current time
  const double mu_total = std::accumulate(sc.mu.begin(), sc.mu.end(), 0.0);
  std::vector<double> lam(k);

  double t = 0.0;
  while (t < sc.horizon) {
    while (!active.empty() && t - times[active.front()] >= ker.cap) active.pop_front();
    const double t_end = std::min(t + ker.step, sc.horizon);
    double bound = mu_total;
    for (std::size_t i : active)
      for (int c = 0; c < k; ++c)
        if (sc.alpha(dims[i], c) > 0.0)
          bound += sc.alpha(dims[i], c) * ker.sup(dims[i], c, t - times[i], t_end - times[i]);
    if (!(bound > 0.0)) {
      t = t_end;
      continue;
    }
    const double s = t - std::log(uniform01(rng)) / bound;
    if (s >= t_end) {
      t = t_end;
      continue;
    }
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      lam[c] = sc.mu[c];
      for (std::size_t i : active)
        lam[c] += sc.alpha(dims[i], c) * ker.density(dims[i], c, s - times[i]);
      total += lam[c];
    }
    if (total > bound * (1.0 + 1e-9))
      throw std::logic_error("simulate_thinning: dominating rate violated");
    const double u = uniform01(rng) * bound;
    t = s;
    if (u >= total) continue;
    double acc = 0.0;
    int d = k - 1;
    for (int c = 0; c < k; ++c) {
      acc += lam[c];
      if (u < acc) {
        d = c;
        break;
      }
    }
    if (!times.empty() && s <= times.back()) continue;
    times.push_back(s);
    dims.push_back(d);
    active.push_back(times.size() - 1);
  }
  return EventSequence(std::move(times), std::move(dims), sc.horizon, k);
}

}  // namespace hawkes
