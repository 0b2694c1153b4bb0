#include "rid/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rid/errors.hpp"
#include "rid/importance.hpp"
#include "rid/rashomon.hpp"

namespace rid {

double jaccard(const Interval& a, const Interval& b) {
  if (a.lo > a.hi || b.lo > b.hi) throw std::invalid_argument("malformed interval");
  const double inter = std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
  const double uni = a.length() + b.length() - inter;
  if (uni > 0.0) return inter / uni;
  return a == b ? 1.0 : 0.0;
}

double emd(const VIDistribution& f, const VIDistribution& g) {
  if (f.support_min() != g.support_min() || f.support_max() != g.support_max())
    throw std::invalid_argument("emd requires shared support bounds");
  const auto& fv = f.values();
  const auto& gv = g.values();
  std::size_t fi = 0, gi = 0;
  long double ff = 0.0L, gg = 0.0L;
  long double total = 0.0L;
  double prev = f.support_min();
  while (fi < fv.size() || gi < gv.size()) {
    double next;
    if (fi < fv.size() && (gi >= gv.size() || fv[fi] <= gv[gi]))
      next = fv[fi];
    else
      next = gv[gi];
    total += std::fabs(static_cast<double>(ff - gg)) * (next - prev);
    while (fi < fv.size() && fv[fi] == next) ff += f.weights()[fi++];
    while (gi < gv.size() && gv[gi] == next) gg += g.weights()[gi++];
    prev = next;
  }
  // Beyond the last atom both CDFs are 1; nothing accumulates.
  return static_cast<double>(total);
}

DatasetIntervals interval_report(const Dataset& d, const RunConfig& cfg,
                                 unsigned threads) {
  const std::size_t p = d.n_features();
  DatasetIntervals out;

  const RIDResult rid = estimate_rid(d, cfg, threads);
  for (std::size_t var = 0; var < p; ++var)
    out.rid.push_back(rid.per_variable[var].bwr());

  const BinDataset bin = binarize(d, cfg.max_thresholds);
  const RashomonSet rset =
      enumerate_rset(bin, cfg.epsilon, cfg.lambda, cfg.depth, cfg.max_models);
  const VIMetric metric = make_metric(cfg.metric, cfg.strategy);
  const Seed metric_seed =
      split_rng(cfg.seed, 2 * static_cast<std::uint64_t>(cfg.bootstraps));

  const auto cloud = vic(rset, d, metric, metric_seed);
  const double weight = 1.0 / static_cast<double>(rset.size());
  const auto range = metric_range(cfg.metric);
  for (std::size_t var = 0; var < p; ++var) {
    double lo = cloud[var][0], hi = cloud[var][0];
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(cloud[var].size());
    for (double v : cloud[var]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      atoms.emplace_back(v, weight);
    }
    out.mcr.push_back({lo, hi});
    out.vic.push_back(
        VIDistribution::from_atoms(std::move(atoms), range.first, range.second)
            .bwr());
  }
  return out;
}

namespace {

double sample_median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty list");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

Interval median_bootstrap_ci(const std::vector<double>& scores, Seed seed) {
  constexpr std::size_t kResamples = 1000;
  SplitMix64 rng(seed);
  std::vector<double> medians;
  medians.reserve(kResamples);
  std::vector<double> draw(scores.size());
  for (std::size_t r = 0; r < kResamples; ++r) {
    for (double& v : draw) v = scores[rng.next_below(scores.size())];
    medians.push_back(sample_median(draw));
  }
  std::sort(medians.begin(), medians.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(medians.size() - 1);
    return medians[static_cast<std::size_t>(std::llround(pos))];
  };
  return {at(0.025), at(0.975)};
}

}  // namespace

StabilityReport stability_experiment(DgpId id, int n_datasets,
                                     std::size_t n_samples, double noise,
                                     const RunConfig& cfg, unsigned threads) {
  if (n_datasets < 2) throw DataError("stability needs at least two datasets");
  const std::size_t k = static_cast<std::size_t>(n_datasets);

  std::vector<DatasetIntervals> per_dataset;
  per_dataset.reserve(k);
  StabilityReport report;
  for (std::size_t i = 0; i < k; ++i) {
    DgpSpec spec{id, n_samples, noise, split_rng(cfg.seed, 2 * i)};
    const Dataset data = generate(spec);
    if (i == 0) report.variable_names = data.feature_names;
    RunConfig local = cfg;
    local.seed = split_rng(cfg.seed, 2 * i + 1);
    per_dataset.push_back(interval_report(data, local, threads));
  }

  report.method_labels = {"rid", "mcr", "vic"};
  const auto pick = [&](std::size_t method,
                        std::size_t dataset) -> const std::vector<Interval>& {
    switch (method) {
      case 0: return per_dataset[dataset].rid;
      case 1: return per_dataset[dataset].mcr;
      default: return per_dataset[dataset].vic;
    }
  };

  const std::size_t p = report.variable_names.size();
  for (std::size_t method = 0; method < 3; ++method) {
    std::vector<std::vector<Interval>> intervals;
    for (std::size_t i = 0; i < k; ++i) intervals.push_back(pick(method, i));
    report.intervals.push_back(std::move(intervals));

    std::vector<std::vector<double>> matrix(k, std::vector<double>(k, 1.0));
    std::vector<double> pair_scores;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double mean = 0.0;
        for (std::size_t var = 0; var < p; ++var)
          mean += jaccard(pick(method, i)[var], pick(method, j)[var]);
        mean /= static_cast<double>(p);
        matrix[i][j] = matrix[j][i] = mean;
        pair_scores.push_back(mean);
      }
    }
    report.jaccard.push_back(std::move(matrix));
    report.median_jaccard.push_back(sample_median(pair_scores));
    report.median_ci.push_back(median_bootstrap_ci(
        pair_scores, split_rng(cfg.seed, 0xC100 + method)));
  }
  return report;
}

double coverage_experiment(DgpId id, const Dataset& train, const RunConfig& cfg,
                           int n_test, std::size_t var, double noise,
                           unsigned threads) {
  if (n_test < 1) throw DataError("n_test must be >= 1");
  if (var >= train.n_features()) throw std::invalid_argument("variable out of range");

  const RIDResult rid = estimate_rid(train, cfg, threads);
  const Interval box = rid.per_variable[var].bwr();

  const Predictor f = dgp_predictor(id);
  const std::uint64_t base = 2 * static_cast<std::uint64_t>(cfg.bootstraps) + 1;
  std::size_t inside = 0;
  for (int t = 0; t < n_test; ++t) {
    DgpSpec spec{id, train.n_rows(), noise,
                 split_rng(cfg.seed, base + static_cast<std::uint64_t>(t))};
    const Dataset test = generate(spec);
    const Seed metric_seed =
        split_rng(cfg.seed, base + static_cast<std::uint64_t>(n_test + t));
    const double phi = sub_mr(f, test, var, cfg.strategy, metric_seed);
    if (box.contains(phi)) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(n_test);
}

}  // namespace rid
