#pragma once

#include <vector>

#include "hawkes/types.hpp"

namespace hawkes {

/// Scaled Beta density on (0, T0); 0 outside the open interval.
double beta_pdf(double t, double a, double b, double support);
/// log of beta_pdf; -inf outside (0, T0).
double beta_log_pdf(double t, double a, double b, double support);
double beta_cdf(double t, double a, double b, double support);

/// log[Gamma(a+b) / (Gamma(a) Gamma(b))].
double log_beta_norm(double a, double b);

/// Blended excitation density for a (parent, child) pair, 0-based dims.
double excitation_eval(const ExcitationModel& model, int parent, int child, double lag);
/// Integral of the blended excitation over (0, lag).
double excitation_cdf(const ExcitationModel& model, int parent, int child, double lag);

/// Flattened mixture with every blend weight and normalizer folded into a
/// per-component log coefficient, so a density evaluation costs one exp and
/// two logs per component.
class CompiledExcitation {
 public:
  CompiledExcitation() = default;
  explicit CompiledExcitation(const ExcitationModel& model);

  double density(int parent, int child, double lag) const;
  double support() const { return support_; }
  int num_dims() const { return num_dims_; }

 private:
  struct Term {
    double log_coef;
    double am1;
    double bm1;
  };
  std::vector<Term> terms_;
  std::vector<std::size_t> offset_;  // K*K + 1 entries
  double support_ = 1.0;
  int num_dims_ = 1;
};

}  // namespace hawkes
