#pragma once

#include <string>
#include <vector>

#include "rid/dataset.hpp"
#include "rid/dgp.hpp"
#include "rid/distribution.hpp"
#include "rid/rid.hpp"

namespace rid {

/// Interval Jaccard similarity by length: |a n b| / |a u b|. Identical
/// intervals score 1 (degenerate included); disjoint intervals and a point
/// against a longer interval score 0.
double jaccard(const Interval& a, const Interval& b);

/// Earth mover's (1-Wasserstein) distance on the line: exact integral of the
/// absolute CDF difference over the merged atom breakpoints. Requires both
/// distributions to share support bounds.
double emd(const VIDistribution& f, const VIDistribution& g);

/// Per-variable uncertainty intervals computed three ways on one dataset:
/// RID box-and-whisker ranges over bootstraps, MCR over the plain Rashomon
/// set, and VIC box-and-whisker ranges over the plain Rashomon set.
struct DatasetIntervals {
  std::vector<Interval> rid;
  std::vector<Interval> mcr;
  std::vector<Interval> vic;
};

DatasetIntervals interval_report(const Dataset& d, const RunConfig& cfg,
                                 unsigned threads = 0);

struct StabilityReport {
  std::vector<std::string> method_labels;  // rid, mcr, vic
  std::vector<std::string> variable_names;
  /// intervals[method][dataset][variable]
  std::vector<std::vector<std::vector<Interval>>> intervals;
  /// jaccard[method]: symmetric dataset-by-dataset matrix, unit diagonal,
  /// each cell the Jaccard averaged over variables
  std::vector<std::vector<std::vector<double>>> jaccard;
  std::vector<double> median_jaccard;  // per method, over distinct pairs
  std::vector<Interval> median_ci;     // 95% bootstrap CI of the median
};

/// Generates n_datasets independent datasets from the process and compares
/// the three interval constructions across them.
StabilityReport stability_experiment(DgpId id, int n_datasets,
                                     std::size_t n_samples, double noise,
                                     const RunConfig& cfg, unsigned threads = 0);

/// Builds variable var's RID box-and-whisker range on the training set, then
/// returns the fraction of n_test fresh DGP datasets whose ground-truth
/// reliance lands inside it.
double coverage_experiment(DgpId id, const Dataset& train, const RunConfig& cfg,
                           int n_test, std::size_t var, double noise,
                           unsigned threads = 0);

}  // namespace rid
