#include "hawkes/types.hpp"

#include <cmath>
#include <stdexcept>

#include "hawkes/kernels.hpp"

namespace hawkes {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

EventSequence::EventSequence(std::vector<double> times, std::vector<int> dims,
                             double horizon, int num_dims)
    : times_(std::move(times)), dims_(std::move(dims)), horizon_(horizon), num_dims_(num_dims) {
  require(num_dims_ >= 1, "EventSequence: K must be >= 1");
  require(times_.size() == dims_.size(), "EventSequence: times/dims length mismatch");
  require(std::isfinite(horizon_) && horizon_ >= 0.0, "EventSequence: bad horizon");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require(std::isfinite(times_[i]) && times_[i] >= 0.0, "EventSequence: bad timestamp");
    require(dims_[i] >= 0 && dims_[i] < num_dims_, "EventSequence: dimension out of range");
    if (i > 0) require(times_[i] > times_[i - 1], "EventSequence: timestamps must be strictly increasing");
  }
  if (!times_.empty()) require(horizon_ >= times_.back(), "EventSequence: T before last event");
}

EventSequence EventSequence::empty(double horizon, int num_dims) {
  return EventSequence({}, {}, horizon, num_dims);
}

std::vector<std::size_t> EventSequence::counts() const {
  std::vector<std::size_t> n(num_dims_, 0);
  for (int d : dims_) ++n[d];
  return n;
}

BetaMixture BetaMixture::single(double a, double b) { return {{1.0}, {a}, {b}}; }

BetaMixture BetaMixture::uniform_weights(std::vector<double> a, std::vector<double> b) {
  BetaMixture m;
  m.weights.assign(a.size(), 1.0 / static_cast<double>(a.size()));
  m.a = std::move(a);
  m.b = std::move(b);
  return m;
}

double BetaMixture::density(double lag, double support) const {
  double s = 0.0;
  for (std::size_t h = 0; h < size(); ++h)
    if (weights[h] > 0.0) s += weights[h] * beta_pdf(lag, a[h], b[h], support);
  return s;
}

double BetaMixture::cdf(double lag, double support) const {
  double s = 0.0;
  for (std::size_t h = 0; h < size(); ++h)
    if (weights[h] > 0.0) s += weights[h] * beta_cdf(lag, a[h], b[h], support);
  return std::min(1.0, s);
}

void BetaMixture::validate() const {
  require(!weights.empty(), "BetaMixture: empty");
  require(a.size() == weights.size() && b.size() == weights.size(), "BetaMixture: length mismatch");
  double s = 0.0;
  for (std::size_t h = 0; h < size(); ++h) {
    require(std::isfinite(weights[h]) && weights[h] >= 0.0, "BetaMixture: negative weight");
    require(std::isfinite(a[h]) && a[h] > 0.0 && std::isfinite(b[h]) && b[h] > 0.0,
            "BetaMixture: shapes must be positive");
    s += weights[h];
  }
  require(std::abs(s - 1.0) <= 1e-12 * static_cast<double>(size()) + 1e-12,
          "BetaMixture: weights must sum to 1");
}

const BetaMixture& ExcitationModel::idio_at(int parent, int child) const {
  if (parent < 0 || parent >= num_dims || child < 0 || child >= num_dims)
    throw std::out_of_range("ExcitationModel: dimension out of range");
  return idio[static_cast<std::size_t>(parent) * num_dims + child];
}

BetaMixture& ExcitationModel::idio_at(int parent, int child) {
  return const_cast<BetaMixture&>(std::as_const(*this).idio_at(parent, child));
}

void ExcitationModel::validate() const {
  require(eps >= 0.0 && eps <= 1.0, "ExcitationModel: eps outside [0,1]");
  require(std::isfinite(support) && support > 0.0, "ExcitationModel: T0 must be positive");
  require(num_dims >= 1, "ExcitationModel: K must be >= 1");
  require(idio.size() == static_cast<std::size_t>(num_dims) * num_dims,
          "ExcitationModel: idio must be K x K");
  common.validate();
  for (const auto& m : idio) m.validate();
}

void HawkesParams::validate() const {
  const int k = num_dims();
  require(k >= 1, "HawkesParams: empty mu");
  require(alpha.rows() == k && alpha.cols() == k, "HawkesParams: alpha must be K x K");
  require(excitation.num_dims == k, "HawkesParams: excitation K mismatch");
  for (double m : mu) require(std::isfinite(m) && m >= 0.0, "HawkesParams: mu must be >= 0");
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    require(std::isfinite(alpha.data()[i]) && alpha.data()[i] >= 0.0, "HawkesParams: alpha must be >= 0");
  excitation.validate();
}

void Hyperparams::validate() const {
  for (double v : {mu_shape, mu_rate, alpha_shape, alpha_rate, common.a_shape, common.a_rate,
                   common.b_shape, common.b_rate, idio.a_shape, idio.a_rate, idio.b_shape,
                   idio.b_rate, concentration})
    require(std::isfinite(v) && v > 0.0, "Hyperparams: all values must be positive");
}

LatentState LatentState::all_immigrants(std::size_t n) {
  return {std::vector<std::ptrdiff_t>(n, kImmigrant), std::vector<Allocation>(n)};
}

void LatentState::validate(const EventSequence& seq, double support) const {
  require(parent.size() == seq.size() && alloc.size() == seq.size(), "LatentState: size mismatch");
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const auto p = parent[j];
    if (p == kImmigrant) continue;
    require(p >= 0 && static_cast<std::size_t>(p) < j, "LatentState: parent must precede child");
    const double lag = seq.time(j) - seq.time(static_cast<std::size_t>(p));
    require(lag > 0.0 && lag < support, "LatentState: parent lag outside (0, T0)");
  }
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Random: return "RANDOM";
    case Variant::Idio: return "IDIO";
    case Variant::Common: return "COMMON";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "RANDOM" || s == "random") return Variant::Random;
  if (s == "IDIO" || s == "idio") return Variant::Idio;
  if (s == "COMMON" || s == "common") return Variant::Common;
  throw std::invalid_argument("unknown variant: " + s);
}

}  // namespace hawkes
