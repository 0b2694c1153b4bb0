#pragma once

#include <cstdint>
#include <vector>

#include "rid/dataset.hpp"
#include "rid/distribution.hpp"
#include "rid/importance.hpp"
#include "rid/tree.hpp"

namespace rid {

/// The full epsilon-Rashomon set of depth-bounded trees for one binarized
/// dataset, sorted by (objective, canonical serialization). Trees are
/// structurally distinct models even when their predictions coincide.
struct RashomonSet {
  std::vector<Tree> trees;
  std::vector<double> objectives;  // parallel to trees
  double min_objective = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;
  int depth_bound = 0;
  std::uint64_t dataset_fingerprint = 0;
  FeatureMap map;

  std::size_t size() const { return trees.size(); }
};

/// The same set in shared-node form: trees reference hash-consed (feature,
/// left, right) records instead of owning their nodes, which keeps very large
/// sets affordable to hold and to score in bulk. Root order matches
/// RashomonSet exactly.
struct RashomonDag {
  struct Node {
    std::int32_t feature;  // -1 for a leaf whose label is `left`
    std::uint32_t left;
    std::uint32_t right;
  };

  std::vector<Node> nodes;            // ids 0 and 1 are the label leaves
  std::vector<std::uint32_t> roots;   // one per tree, sorted
  std::vector<double> objectives;     // parallel to roots
  std::vector<std::uint32_t> errors;  // training misclassifications per tree
  double min_objective = 0.0;
  double epsilon = 0.0;
  double lambda = 0.0;
  int depth_bound = 0;
  std::uint64_t dataset_fingerprint = 0;
  FeatureMap map;

  std::size_t size() const { return roots.size(); }
  Tree materialize(std::uint32_t root) const;
};

/// Exact minimum of the regularized objective over all trees of depth at most
/// `depth`, via memoized branch-and-bound over sample-support subproblems.
double min_objective(const BinDataset& d, double lambda, int depth);

/// Enumerates exactly the canonical trees whose objective is within epsilon
/// of the optimum. Throws ResourceError once the model count would exceed
/// max_models.
RashomonSet enumerate_rset(const BinDataset& d, double epsilon, double lambda,
                           int depth, std::size_t max_models);

/// Same contract, shared-node representation.
RashomonDag enumerate_rset_dag(const BinDataset& d, double epsilon, double lambda,
                               int depth, std::size_t max_models);

/// Model class reliance: [min, max] of the metric over the set's trees,
/// evaluated on the raw dataset the set was built from.
Interval mcr(const RashomonSet& rset, const Dataset& d, std::size_t var,
             const VIMetric& metric, Seed s);

/// Variable importance cloud: metric value per (variable, tree).
std::vector<std::vector<double>> vic(const RashomonSet& rset, const Dataset& d,
                                     const VIMetric& metric, Seed s);

}  // namespace rid
