#include "rid/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "rid/errors.hpp"

namespace rid {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
  return out;
}

struct Decomposition {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;

  explicit Decomposition(const Ellipsoid& e) : eig(to_eigen(e.a)) {
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed");
    const auto& vals = eig.eigenvalues();
    const double max_eig = vals(vals.size() - 1);
    if (max_eig <= 0.0 || vals(0) < 1e-10 * max_eig)
      throw DataError("rank deficient design");
  }

  double inverse_diag(std::size_t j) const {
    const auto& v = eig.eigenvectors();
    const auto& lam = eig.eigenvalues();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const double q = v(static_cast<Eigen::Index>(j), k);
      acc += q * q / lam(k);
    }
    return acc;
  }

  Eigen::MatrixXd inverse_sqrt() const {
    const auto& v = eig.eigenvectors();
    const auto& lam = eig.eigenvalues();
    Eigen::VectorXd inv_sqrt(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k)
      inv_sqrt(k) = 1.0 / std::sqrt(lam(k));
    return v * inv_sqrt.asDiagonal() * v.transpose();
  }
};

void require_epsilon(const Ellipsoid& e) {
  if (!e.epsilon_set()) throw std::invalid_argument("ellipsoid epsilon is unset");
}

double adaptive_simpson(double (*f)(double, double), double power, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = (a + b) / 2.0;
  const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
  const double flm = f(lm, power), frm = f(rm, power);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, power, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, power, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double survival_integrand(double u, double power) { return 1.0 - std::pow(u, power); }

double beta_continued_fraction(double a, double b, double x) {
  // Modified Lentz evaluation of the standard continued fraction.
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-14;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * beta_continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

Ellipsoid Ellipsoid::with_epsilon(double eps) const {
  if (eps <= 0.0) throw std::invalid_argument("epsilon must be > 0");
  Ellipsoid out = *this;
  out.epsilon = eps;
  return out;
}

Ellipsoid ols_fit(const Matrix& x, std::span<const double> y) {
  if (x.rows != y.size()) throw DataError("design and response sizes differ");
  if (x.rows == 0 || x.cols == 0) throw DataError("empty design matrix");
  const Eigen::MatrixXd xe = to_eigen(x);
  const Eigen::VectorXd ye =
      Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));

  Ellipsoid e;
  e.a = Matrix::zeros(x.cols, x.cols);
  const Eigen::MatrixXd a = xe.transpose() * xe;
  for (std::size_t i = 0; i < x.cols; ++i)
    for (std::size_t j = 0; j < x.cols; ++j)
      e.a.at(i, j) =
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  e.center.assign(x.cols, 0.0);

  const Decomposition dec(e);  // also validates rank
  const Eigen::VectorXd rhs = xe.transpose() * ye;
  const Eigen::VectorXd theta =
      dec.eig.eigenvectors() *
      (dec.eig.eigenvalues().cwiseInverse().asDiagonal() *
       (dec.eig.eigenvectors().transpose() * rhs));
  for (std::size_t j = 0; j < x.cols; ++j)
    e.center[j] = theta(static_cast<Eigen::Index>(j));
  e.offset = ye.dot(ye - xe * theta);
  return e;
}

double level_set_value(const Ellipsoid& e, std::span<const double> theta) {
  const std::size_t p = e.dim();
  if (theta.size() != p) throw std::invalid_argument("theta has wrong dimension");
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      acc += (theta[i] - e.center[i]) * e.a.at(i, j) * (theta[j] - e.center[j]);
  return acc + e.offset;
}

AxisInterval axis_extrema(const Ellipsoid& e, std::size_t j) {
  require_epsilon(e);
  if (j >= e.dim()) throw std::invalid_argument("axis index out of range");
  const Decomposition dec(e);
  const double half_width = std::sqrt(e.epsilon * dec.inverse_diag(j));
  return {j, e.center[j] - half_width, e.center[j] + half_width};
}

double linear_rid_cdf(const Ellipsoid& e, std::size_t j, double k,
                      const CdfMethod& method) {
  require_epsilon(e);
  if (j >= e.dim()) throw std::invalid_argument("axis index out of range");
  const std::size_t p = e.dim();
  const Decomposition dec(e);

  if (method.kind == CdfMethod::Kind::analytic) {
    const double half_width = std::sqrt(e.epsilon * dec.inverse_diag(j));
    const double r = std::clamp((k - e.center[j]) / half_width, -1.0, 1.0);
    const double shape = (static_cast<double>(p) + 1.0) / 2.0;
    return regularized_incomplete_beta(shape, shape, (r + 1.0) / 2.0);
  }

  if (method.samples < 1) throw DataError("monte carlo needs at least one sample");
  const Eigen::MatrixXd root = std::sqrt(e.epsilon) * dec.inverse_sqrt();
  SplitMix64 rng(method.seed);
  Eigen::VectorXd g(static_cast<Eigen::Index>(p));
  std::size_t below = 0;
  for (std::size_t s = 0; s < method.samples; ++s) {
    for (std::size_t i = 0; i < p; ++i)
      g(static_cast<Eigen::Index>(i)) = rng.next_normal();
    const double norm = g.norm();
    const double radius =
        std::pow(rng.next_unit_open(), 1.0 / static_cast<double>(p)) / norm;
    // Only coordinate j is inspected, so map just that row.
    double coord = e.center[j];
    for (std::size_t i = 0; i < p; ++i)
      coord += radius * root(static_cast<Eigen::Index>(j),
                             static_cast<Eigen::Index>(i)) *
               g(static_cast<Eigen::Index>(i));
    if (coord <= k) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(method.samples);
}

double rld_linear(const Ellipsoid& e, double k) {
  require_epsilon(e);
  if (k < e.offset) return 0.0;
  const double scaled = (k - e.offset) / e.epsilon;
  const double p = static_cast<double>(e.dim());
  return std::min(1.0, std::pow(scaled, p / 2.0));
}

double m_integral(const Ellipsoid& e) {
  require_epsilon(e);
  const double p = static_cast<double>(e.dim());
  const double closed = e.epsilon * p / (p + 2.0);

  // integral over [c, c+eps] of 1 - ((k-c)/eps)^(p/2), substituted to [0, 1]
  const double power = p / 2.0;
  const double fa = survival_integrand(0.0, power);
  const double fb = survival_integrand(1.0, power);
  const double fm = survival_integrand(0.5, power);
  const double whole = (fa + 4.0 * fm + fb) / 6.0;
  const double unit =
      adaptive_simpson(survival_integrand, power, 0.0, 1.0, fa, fm, fb, whole,
                       1e-11, 40);
  const double quadrature = e.epsilon * unit;
  if (std::fabs(quadrature - closed) > 1e-8)
    throw std::logic_error("m integral quadrature check failed");
  return closed;
}

}  // namespace rid
