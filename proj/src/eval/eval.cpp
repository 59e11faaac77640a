#include "hawkes/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hawkes/io.hpp"
#include "hawkes/kernels.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes {

void GridSpec::validate() const {
  if (n_points < 2) throw std::invalid_argument("GridSpec: need at least 2 points");
  if (!(support > 0.0)) throw std::invalid_argument("GridSpec: support must be positive");
}

namespace {

CurveSamples allocate(const std::vector<HawkesParams>& draws, const GridSpec& grid) {
  grid.validate();
  if (draws.empty()) throw std::invalid_argument("curve_samples: no draws");
  CurveSamples cs;
  cs.k = draws.front().num_dims();
  cs.grid = grid;
  cs.values.assign(static_cast<std::size_t>(cs.k) * cs.k,
                   Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(draws.size()), grid.n_points));
  return cs;
}

void fill_draw(const HawkesParams& p, CurveSamples& cs, std::size_t r) {
  if (p.num_dims() != cs.k) throw std::invalid_argument("curve_samples: K differs across draws");
  const CompiledExcitation ex(p.excitation);
  for (int d = 0; d < cs.k; ++d)
    for (int l = 0; l < cs.k; ++l) {
      auto& m = cs.values[static_cast<std::size_t>(d) * cs.k + l];
      for (int g = 0; g < cs.grid.n_points; ++g)
        m(static_cast<Eigen::Index>(r), g) = ex.density(d, l, cs.grid.point(g));
    }
}

void check(const CurveSamples& s) {
  if (s.values.size() != static_cast<std::size_t>(s.k) * s.k || s.draws() == 0)
    throw std::invalid_argument("curve samples: inconsistent shapes");
  for (const auto& m : s.values)
    if (m.cols() != s.grid.n_points || static_cast<std::size_t>(m.rows()) != s.draws())
      throw std::invalid_argument("curve samples: inconsistent shapes");
}

/// Pointwise lower/upper quantiles at level for one pair and grid column.
std::pair<double, double> interval(const Eigen::MatrixXd& m, int g, double level, std::vector<double>& buf) {
  buf.resize(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) buf[static_cast<std::size_t>(r)] = m(r, g);
  std::sort(buf.begin(), buf.end());
  const double a = 1.0 - level;
  return {quantile_sorted(buf, a / 2.0), quantile_sorted(buf, 1.0 - a / 2.0)};
}

}  // namespace

CurveSamples curve_samples(const std::vector<HawkesParams>& draws, const GridSpec& grid) {
  CurveSamples cs = allocate(draws, grid);
  const auto n = static_cast<std::ptrdiff_t>(draws.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) fill_draw(draws[static_cast<std::size_t>(r)], cs, static_cast<std::size_t>(r));
  return cs;
}

CurveSamples curve_samples_serial(const std::vector<HawkesParams>& draws, const GridSpec& grid) {
  CurveSamples cs = allocate(draws, grid);
  for (std::size_t r = 0; r < draws.size(); ++r) fill_draw(draws[r], cs, r);
  return cs;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double rmise(const TruthCurve& truth, const CurveSamples& samples) {
  check(samples);
  const int k = samples.k;
  const double dx = samples.grid.spacing();
  double total = 0.0;
  for (int d = 0; d < k; ++d)
    for (int l = 0; l < k; ++l) {
      const Eigen::VectorXd mean = samples.pair(d, l).colwise().mean();
      double ise = 0.0;
      for (int g = 0; g < samples.grid.n_points; ++g) {
        const double e = truth(d, l, samples.grid.point(g)) - mean(g);
        ise += e * e * dx;
      }
      total += std::sqrt(ise);
    }
  return total / (static_cast<double>(k) * k);
}

double interval_score_cell(double lo, double hi, double x, double alpha) {
  double s = hi - lo;
  if (x < lo) s += 2.0 / alpha * (lo - x);
  if (x > hi) s += 2.0 / alpha * (x - hi);
  return s;
}

double coverage_acr(const CurveSamples& samples, const TruthCurve& truth, double level) {
  check(samples);
  if (samples.draws() < 2) throw std::invalid_argument("coverage_acr: need at least 2 draws");
  std::vector<double> buf;
  std::size_t covered = 0, cells = 0;
  for (int d = 0; d < samples.k; ++d)
    for (int l = 0; l < samples.k; ++l)
      for (int g = 0; g < samples.grid.n_points; ++g) {
        const auto [lo, hi] = interval(samples.pair(d, l), g, level, buf);
        const double x = truth(d, l, samples.grid.point(g));
        covered += (x >= lo && x <= hi) ? 1 : 0;
        ++cells;
      }
  return static_cast<double>(covered) / static_cast<double>(cells);
}

double interval_score(const CurveSamples& samples, const TruthCurve& truth, double level) {
  check(samples);
  if (samples.draws() < 2) throw std::invalid_argument("interval_score: need at least 2 draws");
  std::vector<double> buf;
  double total = 0.0;
  std::size_t cells = 0;
  for (int d = 0; d < samples.k; ++d)
    for (int l = 0; l < samples.k; ++l)
      for (int g = 0; g < samples.grid.n_points; ++g) {
        const auto [lo, hi] = interval(samples.pair(d, l), g, level, buf);
        total += interval_score_cell(lo, hi, truth(d, l, samples.grid.point(g)), 1.0 - level);
        ++cells;
      }
  return total / static_cast<double>(cells);
}

Bands excitation_bands(const CurveSamples& samples, double level) {
  check(samples);
  if (samples.draws() < 2) throw std::invalid_argument("excitation_bands: need at least 2 draws");
  Bands b;
  b.k = samples.k;
  b.grid = samples.grid;
  std::vector<double> buf;
  for (const auto& m : samples.values) {
    Band band;
    const Eigen::VectorXd mean = m.colwise().mean();
    for (int g = 0; g < samples.grid.n_points; ++g) {
      const auto [lo, hi] = interval(m, g, level, buf);
      band.mean.push_back(mean(g));
      band.lo.push_back(lo);
      band.hi.push_back(hi);
    }
    b.pairs.push_back(std::move(band));
  }
  return b;
}

SpectralHistogram spectral_histogram(const std::vector<Eigen::MatrixXd>& alpha_draws, int bins) {
  if (alpha_draws.empty()) throw std::invalid_argument("spectral_histogram: no draws");
  if (bins < 1) throw std::invalid_argument("spectral_histogram: bins must be >= 1");
  SpectralHistogram h;
  std::size_t stationary = 0;
  for (const auto& a : alpha_draws) {
    h.values.push_back(spectral_radius(a));
    stationary += h.values.back() < 1.0 ? 1 : 0;
  }
  h.stationary_fraction = static_cast<double>(stationary) / static_cast<double>(alpha_draws.size());
  const auto [mn, mx] = std::minmax_element(h.values.begin(), h.values.end());
  const double lo = *mn, hi = *mx;
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
    h.lower = {lo};
    h.upper = {hi};
    h.counts = {h.values.size()};
    return h;
  }
  const double w = (hi - lo) / bins;
  h.counts.assign(bins, 0);
  for (int b = 0; b < bins; ++b) {
    h.lower.push_back(lo + b * w);
    h.upper.push_back(b + 1 == bins ? hi : lo + (b + 1) * w);
  }
  for (double v : h.values) {
    auto b = static_cast<int>((v - lo) / w);
    ++h.counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
  }
  return h;
}

void write_bands_csv(const Bands& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "parent,child,t,mean,lower,upper\n";
  for (int d = 0; d < b.k; ++d)
    for (int l = 0; l < b.k; ++l) {
      const Band& band = b.pairs[static_cast<std::size_t>(d) * b.k + l];
      for (int g = 0; g < b.grid.n_points; ++g)
        out << d + 1 << ',' << l + 1 << ',' << format_double(b.grid.point(g)) << ',' << format_double(band.mean[g])
            << ',' << format_double(band.lo[g]) << ',' << format_double(band.hi[g]) << '\n';
    }
}

void write_histogram_csv(const SpectralHistogram& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lower,upper,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    out << format_double(h.lower[b]) << ',' << format_double(h.upper[b]) << ',' << h.counts[b] << '\n';
}

}  // namespace hawkes
