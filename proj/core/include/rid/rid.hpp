#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rid/dataset.hpp"
#include "rid/dgp.hpp"
#include "rid/distribution.hpp"
#include "rid/importance.hpp"

namespace rid {

struct RunConfig {
  double epsilon = 0.05;
  double lambda = 0.01;
  int depth = 4;
  int bootstraps = 50;
  Seed seed = 0;
  std::string metric = "sub_mr";
  MrStrategy strategy;
  std::size_t max_models = 1000000;
  std::size_t max_thresholds = 64;

  void validate() const;
};

struct BootstrapMeta {
  std::size_t rset_size = 0;
  double min_objective = 0.0;
};

/// Output of the bootstrap RID estimator. Every (bootstrap, tree) pair is one
/// tensor entry: the p-vector of metric values on that bootstrap plus the
/// weight 1/(B * |Rset_b|). Metric values under the shipped strategies live
/// on a small rational grid, so the tensor is held as per-bootstrap value
/// tables plus one code per (tree, variable); entries can still be read back
/// individually. The per-variable distributions are exact marginals.
class RIDResult {
 public:
  RunConfig config;
  std::vector<std::string> variable_names;
  std::vector<VIDistribution> per_variable;
  std::vector<BootstrapMeta> bootstraps;

  std::size_t n_variables() const { return variable_names.size(); }
  std::size_t entry_count() const { return entry_offset_.empty() ? 0 : entry_offset_.back(); }

  std::uint32_t entry_bootstrap(std::size_t entry) const;
  double entry_weight(std::size_t entry) const;
  double entry_value(std::size_t entry, std::size_t var) const;

  /// Rebuilds variable var's distribution from the tensor; per_variable is
  /// constructed through this exact procedure.
  VIDistribution marginal(std::size_t var) const;

  /// Joint CDF: total weight of entries with value_j <= k_j for every j.
  double joint_cdf(std::span<const double> kvec) const;

  /// One bootstrap block of tensor rows (values[tree][var]); used by the
  /// estimator and by tests that assemble toy results.
  void append_block(BootstrapMeta meta,
                    const std::vector<std::vector<double>>& rows);

  /// Streaming form of append_block: per-variable tables and codes directly.
  void append_block_coded(BootstrapMeta meta,
                          std::vector<std::vector<double>> tables,
                          std::vector<std::vector<std::uint16_t>> codes);

  void finalize();  // builds per_variable once all blocks are in

 private:
  struct Block {
    std::vector<std::vector<double>> tables;          // [var][code] -> value
    std::vector<std::vector<std::uint16_t>> codes;    // [var][tree]
  };
  std::vector<Block> blocks_;
  std::vector<std::size_t> entry_offset_;  // prefix sums, blocks_.size() + 1

  std::pair<std::size_t, std::size_t> locate(std::size_t entry) const;
};

/// Support bounds of a metric by name (sub_mr spans [-1, 1] under 0-1 loss).
std::pair<double, double> metric_range(const std::string& name);

/// The bootstrap estimator: resample, enumerate each Rashomon set, score
/// every tree on every variable. Bootstrap draws use streams
/// split_rng(seed, b); metric seeds use split_rng(seed, B + b). The result is
/// independent of the worker count.
RIDResult estimate_rid(const Dataset& d, const RunConfig& cfg, unsigned threads = 0);

/// Bootstrap count sufficient for accuracy t at confidence 1 - delta:
/// ceil(ln(2/delta) / (2 t^2)).
std::int64_t required_bootstraps(double t, double delta);

/// Distribution of the DGP's own model reliance across bootstrap replicates,
/// one atom of weight 1/B per replicate (ground-truth reliance target).
VIDistribution dgp_reliance_distribution(DgpId id, const Dataset& d,
                                         std::size_t var, int bootstraps,
                                         const MrStrategy& strat, Seed s);

}  // namespace rid
