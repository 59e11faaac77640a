#include "hawkes/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace hawkes {

namespace {

void check_finite(double t, double a, double b, double support) {
  if (!std::isfinite(t) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(support))
    throw std::domain_error("beta kernel: non-finite input");
  if (a <= 0.0 || b <= 0.0 || support <= 0.0)
    throw std::domain_error("beta kernel: shapes and support must be positive");
}

}  // namespace

double log_beta_norm(double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

double beta_log_pdf(double t, double a, double b, double support) {
  check_finite(t, a, b, support);
  if (t <= 0.0 || t >= support) return -std::numeric_limits<double>::infinity();
  const double x = t / support;
  return log_beta_norm(a, b) - std::log(support) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

double beta_pdf(double t, double a, double b, double support) {
  const double lp = beta_log_pdf(t, a, b, support);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double beta_cdf(double t, double a, double b, double support) {
  check_finite(t, a, b, support);
  if (t <= 0.0) return 0.0;
  if (t >= support) return 1.0;
  const double v = boost::math::ibeta(a, b, t / support);
  return std::clamp(v, 0.0, 1.0);
}

double excitation_eval(const ExcitationModel& model, int parent, int child, double lag) {
  const BetaMixture& idio = model.idio_at(parent, child);
  double v = 0.0;
  if (model.eps > 0.0) v += model.eps * model.common.density(lag, model.support);
  if (model.eps < 1.0) v += (1.0 - model.eps) * idio.density(lag, model.support);
  return v;
}

double excitation_cdf(const ExcitationModel& model, int parent, int child, double lag) {
  const BetaMixture& idio = model.idio_at(parent, child);
  double v = 0.0;
  if (model.eps > 0.0) v += model.eps * model.common.cdf(lag, model.support);
  if (model.eps < 1.0) v += (1.0 - model.eps) * idio.cdf(lag, model.support);
  return std::min(1.0, v);
}

CompiledExcitation::CompiledExcitation(const ExcitationModel& model)
    : support_(model.support), num_dims_(model.num_dims) {
  const double log_t0 = std::log(support_);
  const std::size_t kk = static_cast<std::size_t>(num_dims_) * num_dims_;
  offset_.reserve(kk + 1);
  auto push = [&](const BetaMixture& m, double blend) {
    if (blend <= 0.0) return;
    for (std::size_t h = 0; h < m.size(); ++h) {
      if (m.weights[h] <= 0.0) continue;
      terms_.push_back({std::log(blend * m.weights[h]) + log_beta_norm(m.a[h], m.b[h]) - log_t0,
                        m.a[h] - 1.0, m.b[h] - 1.0});
    }
  };
  for (std::size_t p = 0; p < kk; ++p) {
    offset_.push_back(terms_.size());
    push(model.common, model.eps);
    push(model.idio[p], 1.0 - model.eps);
  }
  offset_.push_back(terms_.size());
}

double CompiledExcitation::density(int parent, int child, double lag) const {
  if (!(lag > 0.0 && lag < support_)) return 0.0;
  const std::size_t p = static_cast<std::size_t>(parent) * num_dims_ + child;
  const double lx = std::log(lag / support_);
  const double l1x = std::log1p(-lag / support_);
  double s = 0.0;
  for (std::size_t i = offset_[p]; i < offset_[p + 1]; ++i) {
    const Term& t = terms_[i];
    s += std::exp(t.log_coef + t.am1 * lx + t.bm1 * l1x);
  }
  return s;
}

}  // namespace hawkes
