#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rid/rng.hpp"

namespace rid {

/// Minimal row-major dense matrix for the linear-model surface; heavy lifting
/// happens behind it.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  static Matrix zeros(std::size_t r, std::size_t c) {
    return {r, c, std::vector<double>(r * c, 0.0)};
  }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Quadratic-loss geometry of the linear model class: SSE level sets are
/// concentric ellipsoids (theta - center)' A (theta - center) = excess with
/// A = X'X, centered at the least-squares solution, floored at the optimal
/// SSE `offset`.
struct Ellipsoid {
  Matrix a;                    // X'X, symmetric positive definite
  std::vector<double> center;  // least-squares coefficients
  double offset = 0.0;         // optimal SSE
  double epsilon = 0.0;        // allowed SSE excess; 0 means unset

  std::size_t dim() const { return center.size(); }
  bool epsilon_set() const { return epsilon > 0.0; }
  Ellipsoid with_epsilon(double eps) const;
};

struct AxisInterval {
  std::size_t j = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Least-squares fit; loss convention here is unnormalized SSE. Throws
/// DataError when the design is rank deficient (relative eigenvalue below
/// 1e-10).
Ellipsoid ols_fit(const Matrix& x, std::span<const double> y);

/// SSE of theta through the quadratic-form identity.
double level_set_value(const Ellipsoid& e, std::span<const double> theta);

/// Most extreme coefficient values along axis j over the epsilon level set:
/// center_j +- sqrt(epsilon * (A^-1)_jj).
AxisInterval axis_extrema(const Ellipsoid& e, std::size_t j);

struct CdfMethod {
  enum class Kind { analytic, monte_carlo };
  Kind kind = Kind::analytic;
  std::size_t samples = 0;
  Seed seed = 0;

  static CdfMethod analytic() { return {}; }
  static CdfMethod monte_carlo(std::size_t samples, Seed seed) {
    return {Kind::monte_carlo, samples, seed};
  }
};

/// Fraction of the solid ellipsoid's volume with theta_j <= k. The coordinate
/// marginal of a uniform ellipsoid is a symmetric Beta((p+1)/2, (p+1)/2) on
/// the axis interval; the Monte Carlo route samples the unit ball and maps it
/// through sqrt(epsilon) * A^{-1/2}.
double linear_rid_cdf(const Ellipsoid& e, std::size_t j, double k,
                      const CdfMethod& method = CdfMethod::analytic());

/// Rashomon loss distribution of the linear class: volume fraction of the
/// k-level set inside the epsilon set, ((k - c)/epsilon)^(p/2) clamped to
/// [0, 1].
double rld_linear(const Ellipsoid& e, double k);

/// Integrated absolute gap between the idealized loss CDF (step at the
/// optimum) and the Rashomon loss distribution: epsilon * p / (p + 2) in
/// closed form, cross-checked against adaptive quadrature.
double m_integral(const Ellipsoid& e);

/// Regularized incomplete beta I_x(a, b) by continued fractions.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace rid
