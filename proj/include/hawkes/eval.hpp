#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hawkes/types.hpp"

namespace hawkes {

/// Midpoints of n equal cells on (0, T0).
struct GridSpec {
  int n_points = 512;
  double support = 1.0;

  double spacing() const { return support / n_points; }
  double point(int i) const { return (i + 0.5) * spacing(); }
  void validate() const;
};

/// For each (parent, child) pair, row-major: a draws x points matrix of
/// excitation densities.
struct CurveSamples {
  int k = 0;
  GridSpec grid;
  std::vector<Eigen::MatrixXd> values;

  std::size_t draws() const { return values.empty() ? 0 : static_cast<std::size_t>(values.front().rows()); }
  const Eigen::MatrixXd& pair(int parent, int child) const { return values[static_cast<std::size_t>(parent) * k + child]; }
};

using TruthCurve = std::function<double(int parent, int child, double lag)>;

/// Evaluates every draw on the grid; parallel over draws.
CurveSamples curve_samples(const std::vector<HawkesParams>& draws, const GridSpec& grid);
CurveSamples curve_samples_serial(const std::vector<HawkesParams>& draws, const GridSpec& grid);

/// Linear interpolation between order statistics (type 7). `sorted` ascending.
double quantile_sorted(const std::vector<double>& sorted, double p);

double rmise(const TruthCurve& truth, const CurveSamples& samples);
double coverage_acr(const CurveSamples& samples, const TruthCurve& truth, double level = 0.95);
double interval_score(const CurveSamples& samples, const TruthCurve& truth, double level = 0.95);
/// Score of one interval [lo, hi] against x at miscoverage alpha.
double interval_score_cell(double lo, double hi, double x, double alpha);

struct Band {
  std::vector<double> mean, lo, hi;
};

struct Bands {
  int k = 0;
  GridSpec grid;
  std::vector<Band> pairs;  // row-major, row = parent
};

Bands excitation_bands(const CurveSamples& samples, double level = 0.95);

struct SpectralHistogram {
  std::vector<double> values;  // per draw
  std::vector<double> lower, upper;
  std::vector<std::size_t> counts;
  double stationary_fraction = 0.0;
};

SpectralHistogram spectral_histogram(const std::vector<Eigen::MatrixXd>& alpha_draws, int bins = 50);

void write_bands_csv(const Bands& b, const std::string& path);
void write_histogram_csv(const SpectralHistogram& h, const std::string& path);

}  // namespace hawkes
