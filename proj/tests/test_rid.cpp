#include <doctest.h>

#include <cmath>

#include "rid/dgp.hpp"
#include "rid/errors.hpp"
#include "rid/io.hpp"
#include "rid/rashomon.hpp"
#include "rid/rid.hpp"
#include "support/oracles.hpp"

using namespace rid;

namespace {

// Labels equal the first feature bit; second feature is noise. Any bootstrap
// keeps the single perfect stump as the unique Rashomon member for tiny
// epsilon.
Dataset stump_dataset(std::size_t n) {
  Dataset d;
  d.feature_names = {"signal", "noise"};
  d.feature_kinds = {FeatureKind::numeric, FeatureKind::numeric};
  d.columns.assign(2, std::vector<double>(n));
  d.labels.resize(n);
  SplitMix64 rng(99);
  for (std::size_t i = 0; i < n; ++i) {
    const int bit = i % 2;
    d.columns[0][i] = bit;
    d.columns[1][i] = static_cast<double>(rng.next_below(2));
    d.labels[i] = static_cast<std::uint8_t>(bit);
  }
  return d;
}

VIDistribution dist_of(std::vector<std::pair<double, double>> atoms) {
  return VIDistribution::from_atoms(std::move(atoms));
}

}  // namespace

TEST_CASE("cdf steps through the atoms") {
  const auto d = dist_of({{0.2, 0.5}, {-0.1, 0.25}, {0.4, 0.25}});
  CHECK(d.cdf(-0.5) == 0.0);
  CHECK(d.cdf(-0.1) == doctest::Approx(0.25));
  CHECK(d.cdf(0.3) == doctest::Approx(0.75));  // mid-support partial sum
  CHECK(d.cdf(0.4) == 1.0);
  CHECK(d.cdf(1.0) == 1.0);
}

TEST_CASE("equal atom values merge by summing weights") {
  const auto d = dist_of({{0.25, 0.5}, {0.25, 0.25}, {0.5, 0.25}});
  CHECK(d.size() == 2);
  CHECK(d.weights()[0] == doctest::Approx(0.75));
}

TEST_CASE("mean agrees between the weighted sum and the survival integral") {
  CHECK(dist_of({{0.3, 1.0}}).mean() == doctest::Approx(0.3));
  CHECK(dist_of({{-0.4, 0.5}, {0.4, 0.5}}).mean() == doctest::Approx(0.0));

  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> atoms;
    double total = 0.0;
    for (int i = 0; i < 10; ++i) {
      atoms.emplace_back(rng.next_unit() * 2.0 - 1.0, rng.next_unit() + 0.01);
      total += atoms.back().second;
    }
    for (auto& a : atoms) a.second /= total;
    CHECK_NOTHROW(static_cast<void>(dist_of(atoms).mean()));  // dual route is the oracle
  }
}

TEST_CASE("quantiles walk the atom list") {
  const auto single = dist_of({{0.7, 1.0}});
  CHECK(single.quantile(0.25) == 0.7);
  CHECK(single.quantile(0.99) == 0.7);

  const auto uniform4 =
      dist_of({{0.1, 0.25}, {0.2, 0.25}, {0.3, 0.25}, {0.4, 0.25}});
  CHECK(uniform4.quantile(0.25) == 0.1);
  CHECK(uniform4.quantile(0.5) == 0.2);
  CHECK(uniform4.quantile(0.75) == 0.3);
  CHECK(uniform4.iqr() == doctest::Approx(0.2));
  CHECK(uniform4.iqr() >= 0.0);
}

TEST_CASE("box-and-whisker range clips to observed atoms") {
  const auto single = dist_of({{0.3, 1.0}});
  CHECK(single.bwr() == Interval{0.3, 0.3});

  // Symmetric five atoms plus a far outlier.
  const auto with_outlier = dist_of(
      {{-0.2, 0.19}, {-0.1, 0.19}, {0.0, 0.24}, {0.1, 0.19}, {0.2, 0.18}, {0.9, 0.01}});
  const Interval box = with_outlier.bwr();
  CHECK(box.lo == -0.2);
  CHECK(box.hi == 0.2);  // 0.9 is beyond q75 + 1.5 iqr

  SplitMix64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<double, double>> atoms;
    for (int i = 0; i < 8; ++i) atoms.emplace_back(rng.next_unit() * 2 - 1, 0.125);
    const auto dist = dist_of(atoms);
    const Interval b = dist.bwr();
    CHECK(b.lo >= dist.values().front());
    CHECK(b.hi <= dist.values().back());
    CHECK(b.lo <= b.hi);
  }
}

TEST_CASE("p_greater is the right tail") {
  const auto single = dist_of({{0.4, 1.0}});
  CHECK(single.p_greater(0.0) == 1.0);
  CHECK(single.p_greater(0.4) == 0.0);  // <= is inclusive

  const auto three = dist_of({{-0.1, 0.2}, {0.0, 0.3}, {0.2, 0.5}});
  CHECK(three.p_greater(0.0) == doctest::Approx(0.5));
}

TEST_CASE("required_bootstraps reproduces the published count") {
  CHECK(required_bootstraps(0.05, 0.05) == 738);
  CHECK(required_bootstraps(0.075, 0.10) == 267);
  CHECK(required_bootstraps(1.0, 0.5) == 1);
  CHECK_THROWS_AS(static_cast<void>(required_bootstraps(0.0, 0.5)), DataError);
  CHECK_THROWS_AS(static_cast<void>(required_bootstraps(0.1, 0.0)), DataError);
  CHECK_THROWS_AS(static_cast<void>(required_bootstraps(0.1, 1.0)), DataError);
}

TEST_CASE("estimate_rid with a singleton set gives unit atoms") {
  const Dataset d = stump_dataset(40);
  RunConfig cfg;
  cfg.epsilon = 0.004;
  cfg.lambda = 0.01;
  cfg.depth = 2;
  cfg.bootstraps = 1;
  cfg.seed = 3;
  const RIDResult r = estimate_rid(d, cfg);
  REQUIRE(r.bootstraps.size() == 1);
  CHECK(r.bootstraps[0].rset_size == 1);
  for (std::size_t var = 0; var < 2; ++var) {
    CHECK(r.per_variable[var].size() == 1);
    CHECK(r.per_variable[var].weights()[0] == doctest::Approx(1.0));
  }
  // The stump reads only the signal variable.
  CHECK(r.per_variable[1].values()[0] == 0.0);
}

TEST_CASE("estimate_rid matches the arithmetic oracle built from public pieces") {
  SplitMix64 rng(404);
  const Dataset d = oracles::random_dataset(rng, 14, 3, 3);
  RunConfig cfg;
  cfg.epsilon = 0.15;
  cfg.lambda = 0.02;
  cfg.depth = 2;
  cfg.bootstraps = 3;
  cfg.seed = 11;

  const RIDResult r = estimate_rid(d, cfg);

  // Oracle: rebuild each bootstrap through the public operations and average
  // the per-bootstrap CDFs with weights 1/(B |R_b|).
  const VIMetric metric = make_metric(cfg.metric, cfg.strategy);
  std::vector<std::vector<std::pair<double, double>>> atoms(d.n_features());
  for (int b = 0; b < cfg.bootstraps; ++b) {
    const Dataset sample = bootstrap_sample(d, split_rng(cfg.seed, b));
    const BinDataset bin = binarize(sample, cfg.max_thresholds);
    const RashomonSet rset =
        enumerate_rset(bin, cfg.epsilon, cfg.lambda, cfg.depth, cfg.max_models);
    CHECK(rset.size() == r.bootstraps[b].rset_size);
    const Seed metric_seed = split_rng(cfg.seed, cfg.bootstraps + b);
    const double w =
        1.0 / (static_cast<double>(cfg.bootstraps) * static_cast<double>(rset.size()));
    for (const Tree& t : rset.trees) {
      const Predictor f = tree_predictor(t, rset.map);
      for (std::size_t var = 0; var < d.n_features(); ++var)
        atoms[var].emplace_back(sub_mr(f, sample, var, cfg.strategy, metric_seed), w);
    }
  }

  for (std::size_t var = 0; var < d.n_features(); ++var) {
    const auto oracle = VIDistribution::from_atoms(atoms[var]);
    // Identical atom multisets: compare CDFs on the merged grid.
    for (double k : oracle.values())
      CHECK(std::fabs(r.per_variable[var].cdf(k) - oracle.cdf(k)) < 1e-12);
    for (double k : r.per_variable[var].values())
      CHECK(std::fabs(r.per_variable[var].cdf(k) - oracle.cdf(k)) < 1e-12);
  }
}

TEST_CASE("tensor entries equal the public metric path bit for bit") {
  SplitMix64 rng(777);
  const Dataset d = oracles::random_dataset(rng, 15, 3, 4);
  for (const MrStrategy& strat :
       {MrStrategy::e_divide(), MrStrategy::permutations(7)}) {
    RunConfig cfg;
    cfg.epsilon = 0.12;
    cfg.lambda = 0.02;
    cfg.depth = 2;
    cfg.bootstraps = 2;
    cfg.seed = 31;
    cfg.strategy = strat;
    const RIDResult r = estimate_rid(d, cfg);

    std::size_t entry = 0;
    for (int b = 0; b < cfg.bootstraps; ++b) {
      const Dataset sample = bootstrap_sample(d, split_rng(cfg.seed, b));
      const BinDataset bin = binarize(sample, cfg.max_thresholds);
      const RashomonSet rset =
          enumerate_rset(bin, cfg.epsilon, cfg.lambda, cfg.depth, cfg.max_models);
      const Seed metric_seed = split_rng(cfg.seed, cfg.bootstraps + b);
      for (const Tree& t : rset.trees) {
        const Predictor f = tree_predictor(t, rset.map);
        for (std::size_t var = 0; var < d.n_features(); ++var) {
          CAPTURE(entry);
          CAPTURE(var);
          CHECK(r.entry_value(entry, var) ==
                sub_mr(f, sample, var, cfg.strategy, metric_seed));
        }
        ++entry;
      }
    }
    CHECK(entry == r.entry_count());
  }
}

TEST_CASE("per-variable distributions are exact marginals of the tensor") {
  const Dataset d = generate({DgpId::monk1, 40, 0.0, 5});
  RunConfig cfg;
  cfg.epsilon = 0.05;
  cfg.lambda = 0.05;
  cfg.depth = 2;
  cfg.bootstraps = 4;
  cfg.seed = 9;
  const RIDResult r = estimate_rid(d, cfg);

  double total = 0.0;
  for (std::size_t e = 0; e < r.entry_count(); ++e) total += r.entry_weight(e);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  for (std::size_t var = 0; var < d.n_features(); ++var) {
    const VIDistribution rebuilt = r.marginal(var);
    REQUIRE(rebuilt.size() == r.per_variable[var].size());
    for (std::size_t i = 0; i < rebuilt.size(); ++i) {
      CHECK(rebuilt.values()[i] == r.per_variable[var].values()[i]);
      CHECK(rebuilt.weights()[i] == r.per_variable[var].weights()[i]);
    }
  }
}

TEST_CASE("cdf is monotone, right-continuous, and reaches one") {
  const Dataset d = generate({DgpId::monk1, 40, 0.0, 8});
  RunConfig cfg;
  cfg.epsilon = 0.05;
  cfg.lambda = 0.05;
  cfg.depth = 2;
  cfg.bootstraps = 3;
  cfg.seed = 2;
  const RIDResult r = estimate_rid(d, cfg);
  for (const auto& dist : r.per_variable) {
    double prev = -0.1;
    for (double k = -1.0; k <= 1.0; k += 0.05) {
      const double f = dist.cdf(k);
      CHECK(f >= prev - 1e-15);
      prev = f;
    }
    CHECK(dist.cdf(dist.support_max()) == doctest::Approx(1.0).epsilon(1e-9));
    // Right-continuity at each atom: cdf(v) already includes the atom.
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const double at = dist.cdf(dist.values()[i]);
      const double just_below = dist.cdf(dist.values()[i] - 1e-12);
      CHECK(at >= just_below);
    }
  }
}

TEST_CASE("joint cdf on a hand-built tensor") {
  RIDResult r;
  r.config = RunConfig{};
  r.config.bootstraps = 2;
  r.variable_names = {"a", "b"};
  // Entries: (0.1, 0.5) w 1/2, then (0.2, 0.1) and (-0.3, 0.9) each w 1/4.
  r.append_block({1, 0.0}, {{0.1, 0.5}});
  r.append_block({2, 0.0}, {{0.2, 0.1}, {-0.3, 0.9}});
  r.finalize();

  CHECK(r.entry_count() == 3);
  CHECK(r.entry_bootstrap(0) == 0);
  CHECK(r.entry_bootstrap(2) == 1);
  CHECK(r.entry_weight(0) == doctest::Approx(0.5));
  CHECK(r.entry_weight(1) == doctest::Approx(0.25));
  CHECK(r.entry_value(1, 0) == 0.2);
  CHECK(r.entry_value(2, 1) == 0.9);

  CHECK(r.joint_cdf(std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(r.joint_cdf(std::vector<double>{-0.5, 1.0}) == 0.0);
  CHECK(r.joint_cdf(std::vector<double>{0.15, 0.6}) == doctest::Approx(0.5));
  CHECK(r.joint_cdf(std::vector<double>{0.2, 0.6}) == doctest::Approx(0.75));
  CHECK_THROWS_AS(static_cast<void>(r.joint_cdf(std::vector<double>{1.0})),
                  std::invalid_argument);

  // Marginals from the same tensor, by hand: variable a has mass 0.25 at -0.3.
  const VIDistribution da = r.marginal(0);
  CHECK(da.cdf(-0.3) == doctest::Approx(0.25));
  CHECK(da.cdf(0.1) == doctest::Approx(0.75));
}

TEST_CASE("worker count does not change the result") {
  const Dataset d = generate({DgpId::monk1, 40, 0.0, 3});
  RunConfig cfg;
  cfg.epsilon = 0.05;
  cfg.lambda = 0.05;
  cfg.depth = 2;
  cfg.bootstraps = 6;
  cfg.seed = 21;
  const RIDResult serial = estimate_rid(d, cfg, 1);
  const RIDResult parallel = estimate_rid(d, cfg, 4);
  CHECK(rid_result_to_json(serial) == rid_result_to_json(parallel));
  REQUIRE(serial.entry_count() == parallel.entry_count());
  for (std::size_t e = 0; e < serial.entry_count(); ++e)
    for (std::size_t j = 0; j < serial.n_variables(); ++j)
      CHECK(serial.entry_value(e, j) == parallel.entry_value(e, j));
}

TEST_CASE("a variable with no usable splits collapses to a zero atom") {
  Dataset d = stump_dataset(40);
  d.feature_names.push_back("constant");
  d.feature_kinds.push_back(FeatureKind::numeric);
  d.columns.push_back(std::vector<double>(40, 2.5));
  RunConfig cfg;
  cfg.epsilon = 0.004;
  cfg.lambda = 0.01;
  cfg.depth = 2;
  cfg.bootstraps = 3;
  cfg.seed = 4;
  const RIDResult r = estimate_rid(d, cfg);
  CHECK(r.per_variable[2].size() == 1);
  CHECK(r.per_variable[2].values()[0] == 0.0);
  CHECK(r.per_variable[2].weights()[0] == doctest::Approx(1.0));
}

TEST_CASE("dgp reliance distribution for unused monk1 variables is a zero atom") {
  const Dataset d = generate({DgpId::monk1, 124, 0.0, 1});
  for (std::size_t var : {2ul, 3ul, 5ul}) {  // 0-based X3, X4, X6
    const auto dist =
        dgp_reliance_distribution(DgpId::monk1, d, var, 100, MrStrategy::e_divide(), 7);
    REQUIRE(dist.size() == 1);
    CHECK(dist.values()[0] == 0.0);
    CHECK(dist.weights()[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("dgp reliance on a variable the rule reads is positive") {
  const Dataset d = generate({DgpId::monk1, 124, 0.0, 1});
  const auto dist =
      dgp_reliance_distribution(DgpId::monk1, d, 4, 200, MrStrategy::e_divide(), 7);
  for (double v : dist.values()) CHECK(v > 0.0);
}

TEST_CASE("dgp reliance with one bootstrap is a single atom") {
  const Dataset d = generate({DgpId::monk1, 60, 0.0, 2});
  const auto dist =
      dgp_reliance_distribution(DgpId::monk1, d, 0, 1, MrStrategy::e_divide(), 3);
  CHECK(dist.size() == 1);
}

TEST_CASE("estimate_rid surfaces the offending bootstrap on overflow") {
  SplitMix64 rng(15);
  const Dataset d = oracles::random_dataset(rng, 20, 4, 2);
  RunConfig cfg;
  cfg.epsilon = 0.5;
  cfg.lambda = 0.0;
  cfg.depth = 3;
  cfg.bootstraps = 2;
  cfg.seed = 5;
  cfg.max_models = 10;
  try {
    static_cast<void>(estimate_rid(d, cfg));
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("bootstrap 0") != std::string::npos);
  }
}
