#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hawkes {

// Dimensions are 0-based in memory and 1-based in every file format.

/// Marked event times on [0, horizon]. Times are strictly increasing; ties are
/// rejected here and must be broken during ingestion.
class EventSequence {
 public:
  EventSequence() = default;
  EventSequence(std::vector<double> times, std::vector<int> dims,
                double horizon, int num_dims);

  /// An empty sequence on [0, horizon].
  static EventSequence empty(double horizon, int num_dims);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double time(std::size_t i) const { return times_[i]; }
  int dim(std::size_t i) const { return dims_[i]; }
  std::span<const double> times() const { return times_; }
  std::span<const int> dims() const { return dims_; }
  double horizon() const { return horizon_; }
  int num_dims() const { return num_dims_; }

  /// Per-dimension event counts n_k.
  std::vector<std::size_t> counts() const;

 private:
  std::vector<double> times_;
  std::vector<int> dims_;
  double horizon_ = 0.0;
  int num_dims_ = 1;
};

/// Finite mixture of Beta(a_h, b_h) kernels scaled to (0, T0).
struct BetaMixture {
  std::vector<double> weights;
  std::vector<double> a;
  std::vector<double> b;

  static BetaMixture single(double a, double b);
  static BetaMixture uniform_weights(std::vector<double> a, std::vector<double> b);

  std::size_t size() const { return weights.size(); }
  double density(double lag, double support) const;
  double cdf(double lag, double support) const;
  void validate() const;
};

/// eps * (common mixture) + (1 - eps) * (idiosyncratic mixture of the pair).
/// idio is K x K row-major, row = parent dimension.
struct ExcitationModel {
  double eps = 0.5;
  double support = 1.0;
  int num_dims = 1;
  BetaMixture common;
  std::vector<BetaMixture> idio;

  const BetaMixture& idio_at(int parent, int child) const;
  BetaMixture& idio_at(int parent, int child);
  void validate() const;
};

struct HawkesParams {
  std::vector<double> mu;
  Eigen::MatrixXd alpha;  // alpha(parent, child)
  ExcitationModel excitation;

  int num_dims() const { return static_cast<int>(mu.size()); }
  double support() const { return excitation.support; }
  void validate() const;
};

struct ShapePrior {
  double a_shape = 1.0;
  double a_rate = 1.0;
  double b_shape = 1.0;
  double b_rate = 1.0;
};

struct Hyperparams {
  double mu_shape = 1.0;     // e
  double mu_rate = 1.0;      // f
  double alpha_shape = 1.0;  // g
  double alpha_rate = 1.0;   // h
  ShapePrior common{0.5, 1.0, 2.0, 1.0};
  ShapePrior idio{};
  double concentration = 1.0;  // DP gamma

  void validate() const;
};

inline constexpr std::ptrdiff_t kImmigrant = -1;

/// Mixture component an offspring lag is attributed to. Idiosyncratic
/// corresponds to W = 1 everywhere in this library.
enum class Source : unsigned char { Common = 0, Idiosyncratic = 1 };

struct Allocation {
  Source source = Source::Common;
  int component = 0;
};

/// Branching structure plus (W, Z) allocations. parent[j] is kImmigrant or an
/// earlier event index i with lag in (0, T0). alloc[j] is meaningful only when
/// event j is an offspring.
struct LatentState {
  std::vector<std::ptrdiff_t> parent;
  std::vector<Allocation> alloc;

  static LatentState all_immigrants(std::size_t n);
  void validate(const EventSequence& seq, double support) const;
};

enum class Variant { Random, Idio, Common };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

}  // namespace hawkes
