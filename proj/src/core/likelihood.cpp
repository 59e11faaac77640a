#include "hawkes/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkes {

Compensator compensator_from_string(const std::string& s) {
  if (s == "exact") return Compensator::Exact;
  if (s == "approx") return Compensator::Approx;
  throw std::invalid_argument("unknown compensator mode: " + s);
}

const char* to_string(Compensator c) { return c == Compensator::Exact ? "exact" : "approx"; }

ParentWindows::ParentWindows(const EventSequence& seq, double support) : first(seq.size(), 0) {
  std::size_t left = 0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const double tj = seq.time(j);
    while (left < j && tj - seq.time(left) >= support) ++left;
    first[j] = left;
  }
}

std::size_t ParentWindows::total_pairs() const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < first.size(); ++j) s += count(j);
  return s;
}

std::vector<std::size_t> candidate_parents(const EventSequence& seq, std::size_t j,
                                           double support) {
  if (j >= seq.size()) throw std::out_of_range("candidate_parents: event index out of range");
  std::vector<std::size_t> out;
  const double tj = seq.time(j);
  const auto times = seq.times();
  // first index with t_i > tj - T0
  auto it = std::upper_bound(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(j), tj - support);
  for (auto i = static_cast<std::size_t>(it - times.begin()); i < j; ++i) {
    const double lag = tj - times[i];
    if (lag > 0.0 && lag < support) out.push_back(i);
  }
  return out;
}

double intensity(const HawkesParams& params, const EventSequence& seq, int k, double t) {
  if (k < 0 || k >= params.num_dims()) throw std::out_of_range("intensity: dimension out of range");
  const double t0 = params.support();
  double lam = params.mu[k];
  const auto times = seq.times();
  auto lo = std::upper_bound(times.begin(), times.end(), t - t0);
  auto hi = std::lower_bound(times.begin(), times.end(), t);
  for (auto it = lo; it != hi; ++it) {
    const auto i = static_cast<std::size_t>(it - times.begin());
    const int d = seq.dim(i);
    lam += params.alpha(d, k) * excitation_eval(params.excitation, d, k, t - times[i]);
  }
  return lam;
}

namespace {

double event_log_intensity(const HawkesParams& params, const CompiledExcitation& ex,
                           const EventSequence& seq, const ParentWindows& win, std::size_t j) {
  const int k = seq.dim(j);
  const double tj = seq.time(j);
  double lam = params.mu[k];
  for (std::size_t i = win.begin(j); i < j; ++i) {
    const int d = seq.dim(i);
    const double a = params.alpha(d, k);
    if (a != 0.0) lam += a * ex.density(d, k, tj - seq.time(i));
  }
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw std::domain_error("log_likelihood: non-positive intensity at an event");
  return std::log(lam);
}

double event_compensator(const HawkesParams& params, const EventSequence& seq, std::size_t i,
                         Compensator mode) {
  const int d = seq.dim(i);
  const double rem = seq.horizon() - seq.time(i);
  double s = 0.0;
  for (int l = 0; l < params.num_dims(); ++l) {
    const double a = params.alpha(d, l);
    if (a == 0.0) continue;
    const double c = (mode == Compensator::Approx || rem >= params.support())
                         ? 1.0
                         : excitation_cdf(params.excitation, d, l, rem);
    s += a * c;
  }
  return s;
}

double background_compensator(const HawkesParams& params, const EventSequence& seq) {
  double s = 0.0;
  for (double m : params.mu) s += m * seq.horizon();
  return s;
}

}  // namespace

double compensator(const HawkesParams& params, const EventSequence& seq, Compensator mode) {
  double s = background_compensator(params, seq);
  for (std::size_t i = 0; i < seq.size(); ++i) s += event_compensator(params, seq, i, mode);
  return s;
}

double log_likelihood_serial(const HawkesParams& params, const EventSequence& seq,
                             Compensator mode) {
  const CompiledExcitation ex(params.excitation);
  const ParentWindows win(seq, params.support());
  double s = -background_compensator(params, seq);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    s += event_log_intensity(params, ex, seq, win, j);
    s -= event_compensator(params, seq, j, mode);
  }
  return s;
}

double log_likelihood(const HawkesParams& params, const EventSequence& seq, Compensator mode) {
  const CompiledExcitation ex(params.excitation);
  const ParentWindows win(seq, params.support());
  const auto n = static_cast<std::ptrdiff_t>(seq.size());
  std::vector<double> slot(seq.size());
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    try {
      slot[u] = event_log_intensity(params, ex, seq, win, u) - event_compensator(params, seq, u, mode);
    } catch (const std::domain_error&) {
      bad = true;
    }
  }
  if (bad) throw std::domain_error("log_likelihood: non-positive intensity at an event");
  double s = -background_compensator(params, seq);
  for (double v : slot) s += v;
  return s;
}

double augmented_log_likelihood(const HawkesParams& params, const EventSequence& seq,
                                const LatentState& latent, Compensator mode) {
  latent.validate(seq, params.support());
  const auto& ex = params.excitation;
  double s = -compensator(params, seq, mode);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const int k = seq.dim(j);
    const auto p = latent.parent[j];
    if (p == kImmigrant) {
      s += std::log(params.mu[k]);
      continue;
    }
    const auto i = static_cast<std::size_t>(p);
    const int d = seq.dim(i);
    const Allocation& al = latent.alloc[j];
    const BetaMixture& m = al.source == Source::Common ? ex.common : ex.idio_at(d, k);
    if (al.component < 0 || static_cast<std::size_t>(al.component) >= m.size())
      throw std::invalid_argument("augmented_log_likelihood: component out of range");
    const auto h = static_cast<std::size_t>(al.component);
    s += std::log(params.alpha(d, k)) +
         beta_log_pdf(seq.time(j) - seq.time(i), m.a[h], m.b[h], ex.support);
  }
  return s;
}

double allocation_log_prior(const HawkesParams& params, const EventSequence& seq,
                            const LatentState& latent) {
  const auto& ex = params.excitation;
  double s = 0.0;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto p = latent.parent[j];
    if (p == kImmigrant) continue;
    const Allocation& al = latent.alloc[j];
    const auto h = static_cast<std::size_t>(al.component);
    if (al.source == Source::Common) {
      s += std::log(ex.eps * ex.common.weights.at(h));
    } else {
      const BetaMixture& m = ex.idio_at(seq.dim(static_cast<std::size_t>(p)), seq.dim(j));
      s += std::log((1.0 - ex.eps) * m.weights.at(h));
    }
  }
  return s;
}

double branching_log_likelihood(const HawkesParams& params, const EventSequence& seq,
                                std::span<const std::ptrdiff_t> parent, Compensator mode) {
  if (parent.size() != seq.size()) throw std::invalid_argument("branching_log_likelihood: size mismatch");
  double s = -compensator(params, seq, mode);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const int k = seq.dim(j);
    if (parent[j] == kImmigrant) {
      s += std::log(params.mu[k]);
      continue;
    }
    const auto i = static_cast<std::size_t>(parent[j]);
    const int d = seq.dim(i);
    s += std::log(params.alpha(d, k)) +
         std::log(excitation_eval(params.excitation, d, k, seq.time(j) - seq.time(i)));
  }
  return s;
}

double spectral_radius(const Eigen::MatrixXd& alpha) {
  if (alpha.rows() != alpha.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  if (!alpha.allFinite()) throw std::domain_error("spectral_radius: non-finite entry");
  if (alpha.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(alpha, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace hawkes
