#include <doctest.h>

#include <cmath>

#include "rid/errors.hpp"
#include "rid/linear.hpp"
#include "rid/rng.hpp"
#include "support/oracles.hpp"

using namespace rid;

namespace {

Matrix identity(std::size_t p) {
  Matrix m = Matrix::zeros(p, p);
  for (std::size_t i = 0; i < p; ++i) m.at(i, i) = 1.0;
  return m;
}

Ellipsoid unit_circle_at(std::vector<double> center, double eps) {
  Ellipsoid e;
  e.a = identity(center.size());
  e.center = std::move(center);
  e.offset = 0.0;
  return e.with_epsilon(eps);
}

Matrix random_design(SplitMix64& rng, std::size_t n, std::size_t p) {
  Matrix x = Matrix::zeros(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x.at(i, j) = rng.next_normal();
  return x;
}

Ellipsoid random_spd_ellipsoid(SplitMix64& rng, std::size_t p, double eps) {
  // X'X of a tall random design is comfortably positive definite.
  const Matrix x = random_design(rng, 8 * p + 10, p);
  std::vector<double> y(x.rows);
  for (double& v : y) v = rng.next_normal();
  return ols_fit(x, y).with_epsilon(eps);
}

}  // namespace

TEST_CASE("ols on the identity design interpolates") {
  Matrix x = identity(2);
  const Ellipsoid e = ols_fit(x, std::vector<double>{1.0, 2.0});
  CHECK(e.center[0] == doctest::Approx(1.0));
  CHECK(e.center[1] == doctest::Approx(2.0));
  CHECK(e.offset == doctest::Approx(0.0));
}

TEST_CASE("a response orthogonal to the design leaves everything in the offset") {
  // col(X) = span{(1,1,0)}, y = (1,-1,0) orthogonal to it.
  Matrix x = Matrix::zeros(3, 1);
  x.at(0, 0) = 1.0;
  x.at(1, 0) = 1.0;
  const std::vector<double> y{1.0, -1.0, 0.0};
  const Ellipsoid e = ols_fit(x, y);
  CHECK(e.center[0] == doctest::Approx(0.0));
  CHECK(e.offset == doctest::Approx(2.0));  // y'y
}

TEST_CASE("normal equations hold at the fitted center") {
  SplitMix64 rng(1);
  const Matrix x = random_design(rng, 50, 3);
  std::vector<double> y(50);
  for (double& v : y) v = rng.next_normal();
  const Ellipsoid e = ols_fit(x, y);

  // X'(y - X theta) = 0 within 1e-8.
  for (std::size_t j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
      double pred = 0.0;
      for (std::size_t k = 0; k < 3; ++k) pred += x.at(i, k) * e.center[k];
      acc += x.at(i, j) * (y[i] - pred);
    }
    CHECK(std::fabs(acc) < 1e-8);
  }
}

TEST_CASE("rank-deficient designs are rejected") {
  Matrix x = Matrix::zeros(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    x.at(i, 0) = static_cast<double>(i);
    x.at(i, 1) = 2.0 * static_cast<double>(i);  // exact collinearity
  }
  CHECK_THROWS_AS(static_cast<void>(ols_fit(x, std::vector<double>{1, 2, 3, 4})),
                  DataError);
}

TEST_CASE("level_set_value equals the direct residual computation") {
  SplitMix64 rng(2);
  const Matrix x = random_design(rng, 30, 3);
  std::vector<double> y(30);
  for (double& v : y) v = rng.next_normal();
  const Ellipsoid e = ols_fit(x, y);

  CHECK(level_set_value(e, e.center) == doctest::Approx(e.offset));

  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> theta(3);
    for (double& t : theta) t = rng.next_normal();
    double sse = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      double pred = 0.0;
      for (std::size_t k = 0; k < 3; ++k) pred += x.at(i, k) * theta[k];
      sse += (y[i] - pred) * (y[i] - pred);
    }
    CHECK(level_set_value(e, theta) == doctest::Approx(sse).epsilon(1e-8));
  }
}

TEST_CASE("boundary points sit at offset plus epsilon") {
  SplitMix64 rng(3);
  const Ellipsoid e = random_spd_ellipsoid(rng, 3, 0.7);
  const AxisInterval iv = axis_extrema(e, 1);
  std::vector<double> theta = e.center;
  theta[1] = iv.hi;
  // The axis extremum is attained on the boundary only at the Lagrange point,
  // which is not axis-aligned in general; check the known unit-ball case.
  const Ellipsoid ball = unit_circle_at({1.0, 2.0}, 1.0);
  std::vector<double> boundary{1.0, 3.0};
  CHECK(level_set_value(ball, boundary) == doctest::Approx(ball.offset + 1.0));
  static_cast<void>(theta);
}

TEST_CASE("axis extrema on the unit circle match the constrained optimizer") {
  const Ellipsoid e = unit_circle_at({1.0, 2.0}, 1.0);
  const AxisInterval iv = axis_extrema(e, 0);
  CHECK(iv.lo == doctest::Approx(0.0));
  CHECK(iv.hi == doctest::Approx(2.0));
  CHECK(oracles::projected_gradient_axis_max(e, 0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("scaling epsilon by four doubles the half-width") {
  SplitMix64 rng(4);
  const Ellipsoid e1 = random_spd_ellipsoid(rng, 4, 0.5);
  const Ellipsoid e4 = e1.with_epsilon(2.0);
  for (std::size_t j = 0; j < 4; ++j) {
    const AxisInterval a = axis_extrema(e1, j);
    const AxisInterval b = axis_extrema(e4, j);
    CHECK((b.hi - b.lo) == doctest::Approx(2.0 * (a.hi - a.lo)).epsilon(1e-10));
  }
}

TEST_CASE("axis extrema match projected gradient on random SPD instances") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 2 + rng.next_below(5);
    const Ellipsoid e = random_spd_ellipsoid(rng, p, 0.25 + rng.next_unit());
    const std::size_t j = rng.next_below(p);
    const AxisInterval iv = axis_extrema(e, j);
    const double numeric = oracles::projected_gradient_axis_max(e, j);
    CAPTURE(trial);
    CHECK(std::fabs(iv.hi - numeric) < 1e-6);
    // Symmetry pins the minimum.
    CHECK(iv.lo == doctest::Approx(2.0 * e.center[j] - iv.hi).epsilon(1e-10));
  }
}

TEST_CASE("nesting: smaller epsilon gives strictly inner extrema") {
  SplitMix64 rng(6);
  const Ellipsoid big = random_spd_ellipsoid(rng, 3, 1.0);
  const Ellipsoid small = big.with_epsilon(0.4);
  for (std::size_t j = 0; j < 3; ++j) {
    const AxisInterval a = axis_extrema(big, j);
    const AxisInterval b = axis_extrema(small, j);
    CHECK(a.lo < b.lo);
    CHECK(b.lo < b.hi);
    CHECK(b.hi < a.hi);
  }
}

TEST_CASE("the cdf at the center is one half") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t p = 1 + rng.next_below(6);
    const Ellipsoid e = random_spd_ellipsoid(rng, p, 0.8);
    const std::size_t j = rng.next_below(p);
    CHECK(std::fabs(linear_rid_cdf(e, j, e.center[j]) - 0.5) < 1e-9);
  }
}

TEST_CASE("the cdf saturates at the axis extrema") {
  SplitMix64 rng(8);
  const Ellipsoid e = random_spd_ellipsoid(rng, 3, 0.6);
  const AxisInterval iv = axis_extrema(e, 2);
  CHECK(linear_rid_cdf(e, 2, iv.lo - 1e-9) == 0.0);
  CHECK(linear_rid_cdf(e, 2, iv.hi + 1e-9) == 1.0);
}

TEST_CASE("analytic cdf agrees with monte carlo") {
  const Ellipsoid e = unit_circle_at({0.0, 0.0}, 1.0);
  const double analytic = linear_rid_cdf(e, 0, 0.5);
  // Known value of the p = 2 marginal beta.
  CHECK(analytic == doctest::Approx(0.8044988905221148).epsilon(1e-9));
  const double mc = linear_rid_cdf(e, 0, 0.5, CdfMethod::monte_carlo(400000, 9));
  CHECK(std::fabs(analytic - mc) < 0.005);

  SplitMix64 rng(10);
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t p = 2 + rng.next_below(4);
    const Ellipsoid r = random_spd_ellipsoid(rng, p, 0.5);
    const std::size_t j = rng.next_below(p);
    const AxisInterval iv = axis_extrema(r, j);
    const double k = iv.lo + (iv.hi - iv.lo) * (0.3 + 0.4 * rng.next_unit());
    const double a = linear_rid_cdf(r, j, k);
    const std::size_t samples = 200000;
    const double m = linear_rid_cdf(r, j, k, CdfMethod::monte_carlo(samples, 77 + trial));
    // three standard errors of a Bernoulli proportion
    const double se = std::sqrt(a * (1.0 - a) / static_cast<double>(samples));
    CAPTURE(trial);
    CHECK(std::fabs(a - m) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("proposition ordering: larger epsilon lies farther from the step") {
  SplitMix64 rng(11);
  const auto point_mass_cdf = [](double center, double k) {
    return center <= k ? 1.0 : 0.0;
  };
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t p = 2 + rng.next_below(3);
    const Ellipsoid big = random_spd_ellipsoid(rng, p, 1.0);
    const Ellipsoid small = big.with_epsilon(0.3);
    const std::size_t j = rng.next_below(p);
    const AxisInterval iv = axis_extrema(big, j);
    for (int g = 0; g <= 40; ++g) {
      const double k = iv.lo + (iv.hi - iv.lo) * g / 40.0;
      const double step = point_mass_cdf(big.center[j], k);
      const double gap_big = std::fabs(step - linear_rid_cdf(big, j, k));
      const double gap_small = std::fabs(step - linear_rid_cdf(small, j, k));
      CHECK(gap_big >= gap_small - 1e-12);
    }
  }
}

TEST_CASE("rld of the linear class is the scaled power law") {
  SplitMix64 rng(12);
  const Ellipsoid e = random_spd_ellipsoid(rng, 2, 1.0);
  CHECK(rld_linear(e, e.offset) == 0.0);
  CHECK(rld_linear(e, e.offset - 0.5) == 0.0);
  CHECK(rld_linear(e, e.offset + e.epsilon) == doctest::Approx(1.0));
  CHECK(rld_linear(e, e.offset + e.epsilon / 2.0) == doctest::Approx(0.5));  // p = 2
  CHECK(rld_linear(e, e.offset + 10.0) == 1.0);
}

TEST_CASE("m_integral closed form and monotonicity") {
  SplitMix64 rng(13);
  const Ellipsoid e2 = random_spd_ellipsoid(rng, 2, 1.0);
  CHECK(m_integral(e2) == doctest::Approx(0.5).epsilon(1e-8));  // eps p/(p+2) = 1*2/4

  const Ellipsoid tiny = e2.with_epsilon(1e-9);
  CHECK(m_integral(tiny) < 1e-9);

  for (std::size_t p = 1; p <= 5; ++p) {
    const Ellipsoid e = random_spd_ellipsoid(rng, p, 0.5);
    double prev = 0.0;
    for (double eps : {0.1, 0.2, 0.4, 0.8, 1.6}) {
      const double m = m_integral(e.with_epsilon(eps));
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("incomplete beta basics") {
  CHECK(regularized_incomplete_beta(1.5, 1.5, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(1.5, 1.5, 1.0) == 1.0);
  CHECK(regularized_incomplete_beta(1.5, 1.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  // I_x(1, 1) is the identity.
  for (double x : {0.1, 0.25, 0.7, 0.93})
    CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
  // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  CHECK(regularized_incomplete_beta(2.5, 4.0, 0.3) ==
        doctest::Approx(1.0 - regularized_incomplete_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
}

TEST_CASE("epsilon must be set before using the level-set operations") {
  Matrix x = identity(2);
  const Ellipsoid e = ols_fit(x, std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(static_cast<void>(axis_extrema(e, 0)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(rld_linear(e, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(e.with_epsilon(-1.0)), std::invalid_argument);
}
