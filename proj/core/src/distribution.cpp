#include "rid/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rid {

VIDistribution VIDistribution::from_atoms(
    std::vector<std::pair<double, double>> atoms, double support_min,
    double support_max) {
  if (atoms.empty()) throw std::invalid_argument("distribution needs atoms");
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  VIDistribution dist;
  dist.support_min_ = support_min;
  dist.support_max_ = support_max;
  for (const auto& [value, weight] : atoms) {
    if (weight <= 0.0) throw std::invalid_argument("atom weights must be positive");
    if (!dist.values_.empty() && dist.values_.back() == value)
      dist.weights_.back() += weight;
    else {
      dist.values_.push_back(value);
      dist.weights_.push_back(weight);
    }
  }

  long double total = 0.0L;
  for (double w : dist.weights_) total += w;
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9)
    throw std::invalid_argument("atom weights must sum to one");
  return dist;
}

double VIDistribution::cdf(double k) const {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < values_.size() && values_[i] <= k; ++i)
    acc += weights_[i];
  return static_cast<double>(acc);
}

double VIDistribution::mean() const {
  long double weighted = 0.0L;
  for (std::size_t i = 0; i < values_.size(); ++i)
    weighted += static_cast<long double>(weights_[i]) * values_[i];

  // Survival-function route: shift the support to start at zero, then
  // E[X - smin] equals the integral of 1 - F over the support.
  long double integral = 0.0L;
  long double cum = 0.0L;
  double prev = support_min_;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    integral += (1.0L - cum) * (values_[i] - prev);
    cum += weights_[i];
    prev = values_[i];
  }
  integral += (1.0L - cum) * (support_max_ - prev);
  const long double via_cdf = support_min_ + integral;

  if (std::fabs(static_cast<double>(weighted - via_cdf)) > 1e-9)
    throw std::logic_error("mean consistency check failed");
  return static_cast<double>(weighted);
}

double VIDistribution::quantile(double alpha) const {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("quantile level must lie in (0, 1)");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    acc += weights_[i];
    if (static_cast<double>(acc) >= alpha) return values_[i];
  }
  return values_.back();  // guards rounding at alpha near 1
}

double VIDistribution::iqr() const { return quantile(0.75) - quantile(0.25); }

Interval VIDistribution::bwr() const {
  const double q25 = quantile(0.25);
  const double q75 = quantile(0.75);
  const double reach = 1.5 * (q75 - q25);
  const double lo_fence = q25 - reach;
  const double hi_fence = q75 + reach;
  double lo = q25, hi = q75;
  for (double v : values_) {
    if (v >= lo_fence) {
      lo = v;
      break;
    }
  }
  for (auto it = values_.rbegin(); it != values_.rend(); ++it) {
    if (*it <= hi_fence) {
      hi = *it;
      break;
    }
  }
  return {lo, hi};
}

double VIDistribution::p_greater(double threshold) const { return 1.0 - cdf(threshold); }

}  // namespace rid
