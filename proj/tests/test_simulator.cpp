#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hawkes/likelihood.hpp"
#include "hawkes/simulator.hpp"

using namespace hawkes;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

std::vector<double> gaps(const EventSequence& s, std::size_t limit) {
  std::vector<double> g;
  for (std::size_t i = 1; i < s.size() && g.size() < limit; ++i) g.push_back(s.time(i) - s.time(i - 1));
  return g;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("expected rates of the benchmark design") {
  const SimScenario sc = benchmark_scenario(0.5, false, 100.0, 1);
  const auto lam = expected_rates(sc.mu, sc.alpha);
  // Hand solve: (I - A^T) lam = mu with det 0.115.
  CHECK(lam[0] == doctest::Approx(0.05 / 0.115).epsilon(1e-12));
  CHECK(lam[1] == doctest::Approx(0.0475 / 0.115).epsilon(1e-12));
  CHECK(lam[0] == doctest::Approx(0.43478).epsilon(1e-4));
  CHECK(lam[1] == doctest::Approx(0.41304).epsilon(1e-4));
  const auto scaled = expected_rates({0.1, 0.2}, sc.alpha);
  CHECK(scaled[0] == doctest::Approx(2.0 * lam[0]).epsilon(1e-12));
  const auto flat = expected_rates({0.3, 0.4}, Eigen::MatrixXd::Zero(2, 2));
  CHECK(flat == std::vector<double>{0.3, 0.4});
  CHECK_THROWS_AS(expected_rates({0.1}, Eigen::MatrixXd::Constant(1, 1, 1.0)), std::domain_error);
}

TEST_CASE("truth curves") {
  const SimScenario beta = benchmark_scenario(1.0, false, 10.0, 1);
  // eps = 1: every pair equals the common Beta(1, 4) = 4 (1-t)^3.
  for (int d = 0; d < 2; ++d)
    for (int l = 0; l < 2; ++l) CHECK(beta.truth_density(d, l, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
  const SimScenario ex = benchmark_scenario(0.2, true, 10.0, 1);
  CHECK(ex.truth_density(0, 1, 0.5) == doctest::Approx(0.2 * std::exp(-0.5) + 0.8 * 0.8 * std::exp(-0.4)));
  CHECK(std::get<ExponentialBlend>(ex.excitation).cdf(0, 0, 1e9) == doctest::Approx(1.0));
  CHECK_THROWS_AS(scenario_params(ex), std::invalid_argument);
}

TEST_CASE("branching simulation is deterministic and consistent") {
  const SimScenario sc = benchmark_scenario(0.5, false, 2000.0, 99);
  const SimulationResult a = simulate_branching(sc);
  const SimulationResult b = simulate_branching(sc);
  REQUIRE(a.events.size() == b.events.size());
  CHECK(std::equal(a.events.times().begin(), a.events.times().end(), b.events.times().begin()));
  CHECK(std::equal(a.events.dims().begin(), a.events.dims().end(), b.events.dims().begin()));
  CHECK(a.latent.parent == b.latent.parent);
  CHECK_NOTHROW(a.latent.validate(a.events, 1.0));
  for (std::size_t j = 0; j < a.events.size(); ++j) {
    CHECK(a.events.time(j) >= 0.0);
    CHECK(a.events.time(j) <= sc.horizon);
    if (a.latent.parent[j] != kImmigrant) {
      const double lag = a.events.time(j) - a.events.time(static_cast<std::size_t>(a.latent.parent[j]));
      CHECK((lag > 0.0 && lag < 1.0));
    }
  }
  const SimulationResult c = simulate_branching(benchmark_scenario(0.5, false, 2000.0, 100));
  CHECK(c.events.size() != a.events.size());
}

TEST_CASE("alpha = 0 gives Poisson counts and mu = 0 gives nothing") {
  SimScenario sc = benchmark_scenario(0.5, false, 5000.0, 3);
  sc.alpha.setZero();
  const auto res = simulate_branching(sc);
  const auto n = res.events.counts();
  CHECK(static_cast<double>(n[0]) == doctest::Approx(250.0).epsilon(3 * std::sqrt(250.0) / 250.0));
  CHECK(static_cast<double>(n[1]) == doctest::Approx(500.0).epsilon(3 * std::sqrt(500.0) / 500.0));
  for (auto p : res.latent.parent) CHECK(p == kImmigrant);
  const auto thin = simulate_thinning(sc);
  CHECK(static_cast<double>(thin.counts()[1]) == doctest::Approx(500.0).epsilon(3 * std::sqrt(500.0) / 500.0));
  sc.mu = {0.0, 0.0};
  CHECK(simulate_branching(sc).events.empty());
  CHECK(simulate_thinning(sc).empty());
}

TEST_CASE("explosive scenarios are refused") {
  SimScenario sc = benchmark_scenario(0.5, false, 100.0, 3);
  sc.alpha << 0.9, 0.5, 0.5, 0.9;
  CHECK_THROWS(simulate_branching(sc));
  CHECK_THROWS(simulate_thinning(sc));
}

TEST_CASE("immigrant counts estimate mu without bias") {
  // Over 30 seeds the mean immigrant count is within 3 standard errors of mu T.
  const int seeds = 30;
  const double horizon = 1000.0;
  std::vector<double> im0;
  for (int s = 0; s < seeds; ++s) {
    const auto res = simulate_branching(benchmark_scenario(0.2, false, horizon, 500 + s));
    double c = 0.0;
    for (std::size_t j = 0; j < res.events.size(); ++j)
      if (res.latent.parent[j] == kImmigrant && res.events.dim(j) == 0) c += 1.0;
    im0.push_back(c);
  }
  const double mean = std::accumulate(im0.begin(), im0.end(), 0.0) / seeds;
  CHECK(std::abs(mean - 50.0) < 3.0 * std::sqrt(50.0 / seeds));
}

TEST_CASE("branching and thinning agree") {
  for (bool exponential : {false, true}) {
    CAPTURE(exponential);
    // Rates: per-seed counts over 50 seeds, two-sample mean comparison.
    const int seeds = 50;
    std::vector<double> nb, nt;
    for (int s = 0; s < seeds; ++s) {
      const SimScenario sc = benchmark_scenario(0.5, exponential, 400.0, 1000 + s);
      nb.push_back(static_cast<double>(simulate_branching(sc).events.counts()[0]));
      nt.push_back(static_cast<double>(simulate_thinning(sc).counts()[0]));
    }
    auto mv = [](const std::vector<double>& v) {
      const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      double ss = 0.0;
      for (double x : v) ss += (x - m) * (x - m);
      return std::pair{m, ss / (v.size() - 1)};
    };
    const auto [mb, vb] = mv(nb);
    const auto [mt, vt] = mv(nt);
    CHECK(std::abs(mb - mt) < 3.0 * std::sqrt((vb + vt) / seeds));

    // Inter-event times: gaps of one path are autocorrelated, so take every
    // 10th gap from 30 independent paths before applying the KS test (level 0.001).
    std::vector<double> gb, gt;
    for (int s = 0; s < 30; ++s) {
      const SimScenario sc = benchmark_scenario(0.5, exponential, 4000.0, 5000 + s);
      const auto b = gaps(simulate_branching(sc).events, 1u << 30);
      const auto t = gaps(simulate_thinning(sc), 1u << 30);
      for (std::size_t i = 0; i < b.size(); i += 10) gb.push_back(b[i]);
      for (std::size_t i = 0; i < t.size(); i += 10) gt.push_back(t[i]);
    }
    const double n_eff = static_cast<double>(gb.size() * gt.size()) / static_cast<double>(gb.size() + gt.size());
    CHECK(ks_statistic(gb, gt) < 1.949 / std::sqrt(n_eff));
  }
}

TEST_CASE("thinning is deterministic") {
  const SimScenario sc = benchmark_scenario(0.8, true, 500.0, 5);
  const auto a = simulate_thinning(sc);
  const auto b = simulate_thinning(sc);
  REQUIRE(a.size() == b.size());
  CHECK(std::equal(a.times().begin(), a.times().end(), b.times().begin()));
}

}  // TEST_SUITE
