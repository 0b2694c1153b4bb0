#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "rid/dataset.hpp"
#include "rid/dgp.hpp"
#include "rid/rng.hpp"
#include "rid/tree.hpp"

namespace rid {

/// A deterministic classifier over raw feature rows.
using Predictor = std::function<int(std::span<const double>)>;

Predictor tree_predictor(Tree t, FeatureMap map);
Predictor dgp_predictor(DgpId id);

/// How the switched loss is estimated: exchange the column between two fixed
/// halves of the data (e_divide), or average over sampled permutations.
struct MrStrategy {
  enum class Kind { e_divide, permutations };
  Kind kind = Kind::e_divide;
  std::size_t permutation_count = 0;

  static MrStrategy e_divide() { return {}; }
  static MrStrategy permutations(std::size_t count);

  std::string to_string() const;
  static MrStrategy parse(const std::string& text);
};

/// Fraction of rows the predictor labels incorrectly.
double zero_one_loss(const Predictor& f, const Dataset& d);

/// Expected loss after scrambling column var.
///
/// e_divide: with h = floor(n/2), the first h rows and the next h rows
/// exchange their var columns positionally (an odd trailing row is dropped);
/// returns the mean of the two switched losses. permutations(K): mean loss
/// over K Fisher-Yates shuffles of the column, drawn from the stream of s.
double loss_switch(const Predictor& f, const Dataset& d, std::size_t var,
                   const MrStrategy& strat, Seed s);

/// Subtractive model reliance: switched loss minus baseline loss. Under
/// e_divide the baseline is computed on the same 2h rows, so a variable the
/// predictor never reads scores exactly zero.
double sub_mr(const Predictor& f, const Dataset& d, std::size_t var,
              const MrStrategy& strat, Seed s);

/// A variable-importance metric handle; RID works with any bounded metric.
using VIMetric =
    std::function<double(const Predictor&, const Dataset&, std::size_t, Seed)>;

/// Builds the named metric ("sub_mr" is the only one shipped).
VIMetric make_metric(const std::string& name, const MrStrategy& strat);

}  // namespace rid
