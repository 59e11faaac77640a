#include <doctest.h>

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <filesystem>

#include "hawkes/io.hpp"
#include "hawkes/kernels.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/rng.hpp"
#include "oracles.hpp"

using namespace hawkes;

namespace {

HawkesParams two_dim_params() {
  HawkesParams p;
  p.mu = {0.3, 0.5};
  p.alpha.resize(2, 2);
  p.alpha << 0.2, 0.1, 0.3, 0.4;
  p.excitation.eps = 0.4;
  p.excitation.support = 2.0;
  p.excitation.num_dims = 2;
  p.excitation.common = BetaMixture::uniform_weights({1.5, 3.0}, {2.0, 1.2});
  for (int i = 0; i < 4; ++i) p.excitation.idio.push_back(BetaMixture::single(1.0 + i, 2.0));
  return p;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("event sequence validation") {
  CHECK_NOTHROW(EventSequence({0.1, 0.5}, {0, 1}, 1.0, 2));
  CHECK_THROWS_AS(EventSequence({0.5, 0.5}, {0, 0}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EventSequence({0.5, 0.4}, {0, 0}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EventSequence({0.5}, {2}, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(EventSequence({1.5}, {0}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EventSequence({0.5}, {0, 1}, 1.0, 2), std::invalid_argument);
  const EventSequence e = EventSequence::empty(3.0, 2);
  CHECK(e.empty());
  CHECK(e.counts() == std::vector<std::size_t>{0, 0});
  const EventSequence s({0.1, 0.2, 0.3}, {1, 0, 1}, 1.0, 2);
  CHECK(s.counts() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("beta kernel closed forms") {
  // Beta(2, 3) on (0, 2): 12 x (1-x)^2 / 2 at x = 0.25.
  CHECK(beta_pdf(0.5, 2.0, 3.0, 2.0) == doctest::Approx(6.0 * 0.25 * 0.5625).epsilon(1e-14));
  CHECK(beta_pdf(0.3, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta_pdf(0.0, 2.0, 2.0, 1.0) == 0.0);
  CHECK(beta_pdf(1.0, 2.0, 2.0, 1.0) == 0.0);
  CHECK(beta_pdf(-0.1, 2.0, 2.0, 1.0) == 0.0);
  CHECK(std::isinf(beta_log_pdf(1.5, 2.0, 2.0, 1.0)));
  // I_x(2, 2) = 3x^2 - 2x^3.
  CHECK(beta_cdf(0.3, 2.0, 2.0, 1.0) == doctest::Approx(3 * 0.09 - 2 * 0.027).epsilon(1e-14));
  CHECK(beta_cdf(5.0, 2.0, 2.0, 1.0) == 1.0);
  CHECK(beta_cdf(-1.0, 2.0, 2.0, 1.0) == 0.0);
  CHECK(log_beta_norm(2.0, 3.0) == doctest::Approx(std::log(12.0)).epsilon(1e-14));
  CHECK_THROWS_AS(beta_pdf(0.5, 0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(beta_pdf(NAN, 1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("compiled excitation matches direct evaluation") {
  const HawkesParams p = two_dim_params();
  const CompiledExcitation ex(p.excitation);
  for (int d = 0; d < 2; ++d)
    for (int l = 0; l < 2; ++l)
      for (double t : {0.01, 0.4, 1.1, 1.99}) {
        CHECK(ex.density(d, l, t) == doctest::Approx(excitation_eval(p.excitation, d, l, t)).epsilon(1e-13));
        CHECK(ex.density(d, l, t) == doctest::Approx(oracle::phi(p.excitation, d, l, t)).epsilon(1e-13));
        CHECK(excitation_cdf(p.excitation, d, l, t) ==
              doctest::Approx(oracle::Phi(p.excitation, d, l, t)).epsilon(1e-12));
      }
  CHECK(ex.density(0, 0, 2.5) == 0.0);
  CHECK(ex.density(0, 0, 0.0) == 0.0);
}

TEST_CASE("mixture weight validation") {
  BetaMixture m = BetaMixture::uniform_weights({1, 2}, {1, 2});
  CHECK_NOTHROW(m.validate());
  m.weights[0] = 0.7;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  HawkesParams p = two_dim_params();
  CHECK_THROWS_AS(p.excitation.idio_at(2, 0), std::out_of_range);
  p.excitation.eps = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("parent windows are the contiguous lag range") {
  const EventSequence s({0.1, 0.5, 1.15, 1.2, 3.0}, {0, 0, 0, 0, 0}, 4.0, 1);
  const ParentWindows w(s, 1.0);
  CHECK(w.begin(0) == 0);
  CHECK(w.count(0) == 0);
  CHECK(w.begin(2) == 1);  // 1.15 - 0.1 > 1
  CHECK(w.begin(3) == 1);
  CHECK(w.begin(4) == 4);
  CHECK(w.total_pairs() == 0 + 1 + 1 + 2 + 0);
  CHECK(candidate_parents(s, 3, 1.0) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("likelihood hand example") {
  // One dimension, uniform kernel on (0, 1): lambda = mu + alpha at t1.
  HawkesParams p;
  p.mu = {0.5};
  p.alpha = Eigen::MatrixXd::Constant(1, 1, 0.4);
  p.excitation.eps = 1.0;
  p.excitation.support = 1.0;
  p.excitation.num_dims = 1;
  p.excitation.common = BetaMixture::single(1.0, 1.0);
  p.excitation.idio = {BetaMixture::single(1.0, 1.0)};
  const EventSequence s({1.0, 1.5, 2.8}, {0, 0, 0}, 3.0, 1);
  const double approx = std::log(0.5) + std::log(0.9) + std::log(0.5) - 1.5 - 3 * 0.4;
  CHECK(log_likelihood(p, s, Compensator::Approx) == doctest::Approx(approx).epsilon(1e-14));
  // Exact: the last event only has 0.2 of its kernel inside [0, T].
  const double exact = approx + 0.4 * 0.8;
  CHECK(log_likelihood(p, s, Compensator::Exact) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(intensity(p, s, 0, 1.6) == doctest::Approx(0.5 + 0.8).epsilon(1e-14));
}

TEST_CASE("likelihood handles empty sequences and zero-intensity events") {
  HawkesParams p = two_dim_params();
  const EventSequence e = EventSequence::empty(10.0, 2);
  CHECK(log_likelihood(p, e) == doctest::Approx(-8.0).epsilon(1e-15));
  p.mu[0] = 0.0;
  const EventSequence s({0.5}, {0}, 1.0, 2);
  CHECK_THROWS_AS(log_likelihood(p, s), std::domain_error);
  CHECK_THROWS_AS(log_likelihood_serial(p, s), std::domain_error);
}

TEST_CASE("spectral radius") {
  Eigen::MatrixXd a(2, 2);
  a << 0.6, 0.15, 0.3, 0.6;
  CHECK(spectral_radius(a) == doctest::Approx(0.6 + std::sqrt(0.045)).epsilon(1e-14));
  CHECK(spectral_radius(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
  Eigen::MatrixXd rot(2, 2);
  rot << 0.0, -0.5, 0.5, 0.0;  // complex pair +-0.5i
  CHECK(spectral_radius(rot) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("rng streams and distributions") {
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  Rng a = make_rng(42, 3), b = make_rng(42, 3);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());

  Rng g = make_rng(7);
  const int n = 200000;
  double s = 0.0, s2 = 0.0, ls = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = gamma_draw(g, 0.3, 2.0);
    s += x;
    s2 += x * x;
  }
  CHECK(s / n == doctest::Approx(0.15).epsilon(0.03));
  CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(0.075).epsilon(0.05));
  for (int i = 0; i < n; ++i) ls += log_gamma_draw(g, 1e-3);
  // E log X for X ~ Gamma(1e-3) is digamma(1e-3) ~ -1000.42.
  CHECK(ls / n == doctest::Approx(-1000.42).epsilon(0.02));
  double bs = 0.0;
  for (int i = 0; i < n; ++i) bs += beta_draw(g, 2.0, 6.0);
  CHECK(bs / n == doctest::Approx(0.25).epsilon(0.01));
  double ps = 0.0;
  for (int i = 0; i < n; ++i) ps += static_cast<double>(poisson_draw(g, 3.5));
  CHECK(ps / n == doctest::Approx(3.5).epsilon(0.01));
  const std::vector<double> conc{0.5, 1.0, 2.5};
  std::vector<double> dm(3, 0.0);
  for (int i = 0; i < 20000; ++i) {
    const auto d = dirichlet_draw(g, conc);
    for (int c = 0; c < 3; ++c) dm[c] += d[c] / 20000.0;
  }
  CHECK(dm[0] == doctest::Approx(0.125).epsilon(0.05));
  CHECK(dm[2] == doctest::Approx(0.625).epsilon(0.02));
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(g);
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("categorical and softmax helpers") {
  Rng g = make_rng(1);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> w{ninf, std::log(1.0), std::log(3.0)};
  std::array<int, 3> counts{};
  for (int i = 0; i < 40000; ++i) ++counts[categorical_log(g, w)];
  CHECK(counts[0] == 0);
  CHECK(counts[2] / 40000.0 == doctest::Approx(0.75).epsilon(0.02));
  std::vector<double> v{std::log(2.0), std::log(6.0)};
  CHECK(softmax_inplace(v) == doctest::Approx(std::log(8.0)).epsilon(1e-15));
  CHECK(v[0] == doctest::Approx(0.25).epsilon(1e-15));
  std::vector<double> none{ninf, ninf};
  CHECK_THROWS_AS(categorical_log(g, none), std::domain_error);
  CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("io round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "hawkes_io_test";
  std::filesystem::remove_all(dir);
  const EventSequence s({0.1, 1.0 / 3.0, 2.0}, {1, 0, 1}, 5.0, 2);
  write_sequence(s, dir / "events");
  const EventSequence r = read_sequence(dir / "events");
  CHECK(r.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.time(i) == s.time(i));
    CHECK(r.dim(i) == s.dim(i));
  }
  CHECK(r.horizon() == 5.0);
  CHECK(r.num_dims() == 2);

  const HawkesParams p = two_dim_params();
  write_params(p, dir / "params.json");
  const HawkesParams q = read_params(dir / "params.json");
  CHECK(q.mu == p.mu);
  CHECK(q.alpha == p.alpha);
  CHECK(q.excitation.common.a == p.excitation.common.a);
  CHECK(q.excitation.idio_at(1, 0).a == p.excitation.idio_at(1, 0).a);
  CHECK(params_to_json(q) == params_to_json(p));

  Hyperparams h;
  h.mu_rate = 3.0;
  h.idio.b_rate = 0.25;
  const Hyperparams h2 = hyper_from_json(hyper_to_json(h));
  CHECK(h2.mu_rate == 3.0);
  CHECK(h2.idio.b_rate == 0.25);
  CHECK(hyper_from_json(json::object()).common.a_shape == 0.5);

  LatentState lat = LatentState::all_immigrants(3);
  lat.parent[2] = 1;
  write_branching(lat, dir / "branching.csv");
  std::ifstream in(dir / "branching.csv");
  std::string all((std::istreambuf_iterator<char>(in)), {});
  CHECK(all == "child_index,parent_index\n1,0\n2,0\n3,2\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5})
    CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(1.0) == "1");
}

}  // TEST_SUITE
