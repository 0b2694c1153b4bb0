#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace rid {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool operator==(const Interval& other) const {
    return lo == other.lo && hi == other.hi;
  }
};

/// Weighted empirical distribution of a bounded variable-importance metric.
/// Atoms are sorted ascending with exact-equal values merged; weights are
/// positive and sum to one.
class VIDistribution {
 public:
  VIDistribution() = default;

  /// Merges raw (value, weight) atoms. Equal values are combined by summing
  /// weights in their original order, so the result is independent of how the
  /// atoms were grouped upstream.
  static VIDistribution from_atoms(std::vector<std::pair<double, double>> atoms,
                                   double support_min = -1.0,
                                   double support_max = 1.0);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  double support_min() const { return support_min_; }
  double support_max() const { return support_max_; }
  std::size_t size() const { return values_.size(); }

  /// Right-continuous CDF: total weight of atoms with value <= k.
  double cdf(double k) const;

  /// Expectation, computed both as the weighted sum and as the integral of
  /// the survival function; throws std::logic_error if the two routes
  /// disagree beyond 1e-9.
  double mean() const;

  /// Smallest atom value v with cdf(v) >= alpha.
  double quantile(double alpha) const;

  double iqr() const;

  /// Box-and-whisker range: extreme atoms within 1.5 IQR of the quartiles.
  Interval bwr() const;

  /// P(value > threshold) = 1 - cdf(threshold).
  double p_greater(double threshold) const;

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  double support_min_ = -1.0;
  double support_max_ = 1.0;
};

}  // namespace rid
