#include "rid/rid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rid/errors.hpp"
#include "rid/rashomon.hpp"

namespace rid {

void RunConfig::validate() const {
  if (epsilon <= 0.0) throw DataError("epsilon must be > 0");
  if (lambda < 0.0) throw DataError("lambda must be >= 0");
  if (depth < 1) throw DataError("depth must be >= 1");
  if (bootstraps < 1) throw DataError("bootstraps must be >= 1");
  if (max_models < 1) throw DataError("max_models must be >= 1");
  if (max_thresholds < 1) throw DataError("max_thresholds must be >= 1");
  if (metric != "sub_mr") throw DataError("unknown metric '" + metric + "'");
}

std::pair<double, double> metric_range(const std::string& name) {
  if (name == "sub_mr") return {-1.0, 1.0};
  throw DataError("unknown metric '" + name + "'");
}

std::int64_t required_bootstraps(double t, double delta) {
  if (t <= 0.0) throw DataError("t must be > 0");
  if (delta <= 0.0 || delta >= 1.0) throw DataError("delta must lie in (0, 1)");
  return static_cast<std::int64_t>(std::ceil(std::log(2.0 / delta) / (2.0 * t * t)));
}

// ---- RIDResult tensor access ------------------------------------------------

std::pair<std::size_t, std::size_t> RIDResult::locate(std::size_t entry) const {
  if (entry >= entry_count()) throw std::out_of_range("tensor entry out of range");
  const auto it =
      std::upper_bound(entry_offset_.begin(), entry_offset_.end(), entry);
  const std::size_t block = static_cast<std::size_t>(it - entry_offset_.begin()) - 1;
  return {block, entry - entry_offset_[block]};
}

std::uint32_t RIDResult::entry_bootstrap(std::size_t entry) const {
  return static_cast<std::uint32_t>(locate(entry).first);
}

double RIDResult::entry_weight(std::size_t entry) const {
  const std::size_t block = locate(entry).first;
  return 1.0 / (static_cast<double>(bootstraps.size()) *
                static_cast<double>(bootstraps[block].rset_size));
}

double RIDResult::entry_value(std::size_t entry, std::size_t var) const {
  if (var >= n_variables()) throw std::invalid_argument("variable index out of range");
  const auto [block, tree] = locate(entry);
  const Block& b = blocks_[block];
  return b.tables[var][b.codes[var][tree]];
}

VIDistribution RIDResult::marginal(std::size_t var) const {
  if (var >= n_variables()) throw std::invalid_argument("variable index out of range");
  const auto range = metric_range(config.metric);
  const double b_count = static_cast<double>(bootstraps.size());
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t block = 0; block < blocks_.size(); ++block) {
    const Block& b = blocks_[block];
    const double weight =
        1.0 / (b_count * static_cast<double>(bootstraps[block].rset_size));
    std::vector<std::size_t> hist(b.tables[var].size(), 0);
    for (std::uint16_t code : b.codes[var]) ++hist[code];
    for (std::size_t code = 0; code < hist.size(); ++code)
      if (hist[code] > 0)
        atoms.emplace_back(b.tables[var][code],
                           static_cast<double>(hist[code]) * weight);
  }
  return VIDistribution::from_atoms(std::move(atoms), range.first, range.second);
}

double RIDResult::joint_cdf(std::span<const double> kvec) const {
  const std::size_t p = n_variables();
  if (kvec.size() != p) throw std::invalid_argument("joint_cdf arity mismatch");
  const double b_count = static_cast<double>(bootstraps.size());
  long double total = 0.0L;
  for (std::size_t block = 0; block < blocks_.size(); ++block) {
    const Block& b = blocks_[block];
    const std::size_t trees = bootstraps[block].rset_size;
    const double weight =
        1.0 / (b_count * static_cast<double>(bootstraps[block].rset_size));
    for (std::size_t t = 0; t < trees; ++t) {
      bool all = true;
      for (std::size_t j = 0; j < p; ++j) {
        if (b.tables[j][b.codes[j][t]] > kvec[j]) {
          all = false;
          break;
        }
      }
      if (all) total += weight;
    }
  }
  return static_cast<double>(total);
}

void RIDResult::append_block_coded(BootstrapMeta meta,
                                   std::vector<std::vector<double>> tables,
                                   std::vector<std::vector<std::uint16_t>> codes) {
  if (entry_offset_.empty()) entry_offset_.push_back(0);
  entry_offset_.push_back(entry_offset_.back() + meta.rset_size);
  bootstraps.push_back(meta);
  blocks_.push_back({std::move(tables), std::move(codes)});
}

void RIDResult::append_block(BootstrapMeta meta,
                             const std::vector<std::vector<double>>& rows) {
  const std::size_t p = n_variables();
  if (rows.size() != meta.rset_size) throw std::invalid_argument("row count mismatch");
  std::vector<std::vector<double>> tables(p);
  std::vector<std::vector<std::uint16_t>> codes(p);
  for (std::size_t var = 0; var < p; ++var) {
    std::map<double, std::uint16_t> index;
    for (const auto& row : rows) index.emplace(row.at(var), 0);
    if (index.size() > 65535) throw DataError("vi value table overflow");
    for (auto& [value, code] : index) {
      code = static_cast<std::uint16_t>(tables[var].size());
      tables[var].push_back(value);
    }
    codes[var].reserve(rows.size());
    for (const auto& row : rows) codes[var].push_back(index.at(row.at(var)));
  }
  append_block_coded(meta, std::move(tables), std::move(codes));
}

void RIDResult::finalize() {
  per_variable.clear();
  per_variable.reserve(n_variables());
  for (std::size_t var = 0; var < n_variables(); ++var)
    per_variable.push_back(marginal(var));
}

// ---- the estimator ----------------------------------------------------------

namespace {

std::size_t count_tree_errors(const RashomonDag& dag, std::uint32_t node_id,
                              const BitVector& support,
                              const std::vector<const BitVector*>& cols,
                              const BitVector& pos, const BitVector& neg,
                              std::vector<BitVector>& scratch, int level) {
  const RashomonDag::Node& nd = dag.nodes[node_id];
  if (nd.feature < 0)
    return nd.left ? support.count_and(neg) : support.count_and(pos);
  BitVector& left = scratch[static_cast<std::size_t>(2 * level)];
  BitVector& right = scratch[static_cast<std::size_t>(2 * level + 1)];
  const BitVector& col = *cols[static_cast<std::size_t>(nd.feature)];
  BitVector::and_not_into(left, support, col);
  BitVector::and_into(right, support, col);
  return count_tree_errors(dag, nd.left, left, cols, pos, neg, scratch, level + 1) +
         count_tree_errors(dag, nd.right, right, cols, pos, neg, scratch, level + 1);
}

// Sorted distinct variables referenced below each dag node.
std::vector<std::vector<std::uint32_t>> node_variables(const RashomonDag& dag,
                                                       std::size_t p) {
  std::vector<std::vector<std::uint32_t>> vars(dag.nodes.size());
  for (std::size_t id = 0; id < dag.nodes.size(); ++id) {
    const RashomonDag::Node& nd = dag.nodes[id];
    if (nd.feature < 0) continue;  // leaves reference nothing
    std::vector<std::uint32_t> merged;
    const auto& l = vars[nd.left];
    const auto& r = vars[nd.right];
    merged.reserve(l.size() + r.size() + 1);
    std::set_union(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(merged));
    const auto var =
        static_cast<std::uint32_t>(dag.map[static_cast<std::size_t>(nd.feature)].orig_var);
    const auto at = std::lower_bound(merged.begin(), merged.end(), var);
    if (at == merged.end() || *at != var) merged.insert(at, var);
    vars[id] = std::move(merged);
  }
  static_cast<void>(p);
  return vars;
}

struct PerBootstrap {
  BootstrapMeta meta;
  std::vector<std::vector<double>> tables;
  std::vector<std::vector<std::uint16_t>> codes;
};

/// Scores every tree of one bootstrap's Rashomon set on every variable,
/// entirely in bit space over the shared-node form. Substituting a column in
/// raw feature space is equivalent to substituting the derived bit columns,
/// and the floating-point expressions are arranged exactly as in sub_mr(), so
/// the two paths produce identical doubles.
PerBootstrap score_bootstrap(const Dataset& base, const RunConfig& cfg,
                             std::uint32_t b) {
  const Dataset sample = bootstrap_sample(base, split_rng(cfg.seed, b));
  const BinDataset bin = binarize(sample, cfg.max_thresholds);
  RashomonDag dag;
  try {
    dag = enumerate_rset_dag(bin, cfg.epsilon, cfg.lambda, cfg.depth, cfg.max_models);
  } catch (const ResourceError& e) {
    throw ResourceError("bootstrap " + std::to_string(b) + ": " + e.what(),
                        e.partial_count());
  }
  const Seed metric_seed =
      split_rng(cfg.seed, static_cast<std::uint64_t>(cfg.bootstraps) + b);

  const std::size_t n = sample.n_rows();
  const std::size_t p = sample.n_features();
  const std::size_t m = bin.n_features();
  const bool e_divide = cfg.strategy.kind == MrStrategy::Kind::e_divide;
  const std::size_t h = n / 2;
  if (e_divide && n < 2) throw DataError("e_divide needs at least two rows");

  PerBootstrap out;
  out.meta = {dag.size(), dag.min_objective};
  out.tables.resize(p);
  out.codes.resize(p);

  // Row mask the losses are computed over.
  const std::size_t eval_rows = e_divide ? 2 * h : n;
  BitVector mask(n);
  for (std::size_t i = 0; i < eval_rows; ++i) mask.set(i, true);
  BitVector pos(n), neg(n);
  BitVector::and_into(pos, mask, bin.labels);
  BitVector::and_not_into(neg, mask, bin.labels);

  std::vector<BitVector> scratch(2 * static_cast<std::size_t>(cfg.depth) + 2,
                                 BitVector(n));
  std::vector<const BitVector*> base_cols(m);
  for (std::size_t c = 0; c < m; ++c) base_cols[c] = &bin.columns[c];

  // Baseline errors: reuse the training counts when the mask covers all rows.
  std::vector<std::uint32_t> base_errors;
  if (eval_rows == n) {
    base_errors.assign(dag.errors.begin(), dag.errors.end());
  } else {
    base_errors.resize(dag.size());
    for (std::size_t t = 0; t < dag.size(); ++t)
      base_errors[t] = static_cast<std::uint32_t>(count_tree_errors(
          dag, dag.roots[t], mask, base_cols, pos, neg, scratch, 0));
  }

  const auto vars_below = node_variables(dag, p);

  // Index permutations shared by every tree and variable of this bootstrap,
  // replaying the stream each sub_mr call would draw from.
  std::vector<std::vector<std::size_t>> perms;
  if (!e_divide) {
    SplitMix64 rng(metric_seed);
    perms.resize(cfg.strategy.permutation_count);
    for (auto& perm : perms) {
      perm.resize(n);
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
    }
  }

  // Value tables are indexed by the integer numerator of phi, shifted to be
  // nonnegative; actual doubles are derived once per observed numerator.
  const auto numerator_span = e_divide
                                  ? 2 * eval_rows + 1
                                  : 2 * cfg.strategy.permutation_count * n + 1;

  std::vector<BitVector> variant_storage;
  std::vector<const BitVector*> cols(m);
  std::vector<std::uint16_t> tree_codes(dag.size());
  std::vector<std::int32_t> code_of_numerator(numerator_span, -1);

  for (std::size_t var = 0; var < p; ++var) {
    std::vector<std::size_t> features_of_var;
    for (std::size_t c = 0; c < m; ++c)
      if (bin.map[c].orig_var == var) features_of_var.push_back(c);

    std::vector<double>& table = out.tables[var];
    std::fill(tree_codes.begin(), tree_codes.end(), 0);

    // Trees that never read the variable score exactly zero; code 0 is
    // reserved for it up front.
    table.push_back(0.0);

    if (!features_of_var.empty()) {
      std::vector<std::size_t> switched_sum(dag.size(), 0);
      bool any_used = false;
      const std::size_t variants = e_divide ? 1 : perms.size();
      for (std::size_t k = 0; k < variants; ++k) {
        variant_storage.clear();
        cols = base_cols;
        for (std::size_t c : features_of_var) {
          BitVector switched(n);
          if (e_divide) {
            for (std::size_t i = 0; i < h; ++i) {
              switched.set(i, bin.columns[c].test(i + h));
              switched.set(i + h, bin.columns[c].test(i));
            }
          } else {
            for (std::size_t i = 0; i < n; ++i)
              switched.set(i, bin.columns[c].test(perms[k][i]));
          }
          variant_storage.push_back(std::move(switched));
        }
        for (std::size_t c = 0; c < features_of_var.size(); ++c)
          cols[features_of_var[c]] = &variant_storage[c];

        for (std::size_t t = 0; t < dag.size(); ++t) {
          const auto& used = vars_below[dag.roots[t]];
          if (!std::binary_search(used.begin(), used.end(),
                                  static_cast<std::uint32_t>(var)))
            continue;
          any_used = true;
          switched_sum[t] += count_tree_errors(dag, dag.roots[t], mask, cols, pos,
                                               neg, scratch, 0);
        }
      }

      if (any_used) {
        const double denom =
            e_divide ? 2.0 * static_cast<double>(h)
                     : static_cast<double>(cfg.strategy.permutation_count) *
                           static_cast<double>(n);
        const std::ptrdiff_t shift =
            static_cast<std::ptrdiff_t>(numerator_span / 2);
        std::fill(code_of_numerator.begin(), code_of_numerator.end(), -1);
        for (std::size_t t = 0; t < dag.size(); ++t) {
          const auto& used = vars_below[dag.roots[t]];
          if (!std::binary_search(used.begin(), used.end(),
                                  static_cast<std::uint32_t>(var)))
            continue;
          const std::ptrdiff_t numerator =
              static_cast<std::ptrdiff_t>(switched_sum[t]) -
              static_cast<std::ptrdiff_t>(e_divide
                                              ? base_errors[t]
                                              : cfg.strategy.permutation_count *
                                                    base_errors[t]);
          std::int32_t& code = code_of_numerator[static_cast<std::size_t>(
              numerator + shift)];
          if (code < 0) {
            if (numerator == 0) {
              code = 0;  // exact zero shares the reserved atom
            } else {
              if (table.size() > 65535) throw DataError("vi value table overflow");
              code = static_cast<std::int32_t>(table.size());
              const double switched = static_cast<double>(switched_sum[t]) / denom;
              const double baseline =
                  e_divide
                      ? static_cast<double>(base_errors[t]) / denom
                      : static_cast<double>(base_errors[t]) / static_cast<double>(n);
              table.push_back(switched - baseline);
            }
          }
          tree_codes[t] = static_cast<std::uint16_t>(code);
        }
      }
    }
    out.codes[var] = tree_codes;
  }
  return out;
}

}  // namespace

RIDResult estimate_rid(const Dataset& d, const RunConfig& cfg, unsigned threads) {
  cfg.validate();
  d.validate();
  const std::size_t B = static_cast<std::size_t>(cfg.bootstraps);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(B));

  std::vector<PerBootstrap> results(B);
  if (threads <= 1) {
    for (std::size_t b = 0; b < B; ++b)
      results[b] = score_bootstrap(d, cfg, static_cast<std::uint32_t>(b));
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::pair<std::size_t, std::exception_ptr>> failures(threads,
                                                                     {B, nullptr});
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= B) return;
          try {
            results[b] = score_bootstrap(d, cfg, static_cast<std::uint32_t>(b));
          } catch (...) {
            if (b < failures[w].first) failures[w] = {b, std::current_exception()};
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    // Re-raise the failure with the smallest bootstrap index for determinism.
    std::size_t first_b = B;
    std::exception_ptr first;
    for (const auto& [b, err] : failures) {
      if (err && b < first_b) {
        first_b = b;
        first = err;
      }
    }
    if (first) std::rethrow_exception(first);
  }

  RIDResult out;
  out.config = cfg;
  out.variable_names = d.feature_names;
  for (auto& r : results) {
    out.append_block_coded(r.meta, std::move(r.tables), std::move(r.codes));
    r.tables.clear();
    r.codes.clear();
  }
  out.finalize();
  return out;
}

VIDistribution dgp_reliance_distribution(DgpId id, const Dataset& d,
                                         std::size_t var, int bootstraps,
                                         const MrStrategy& strat, Seed s) {
  if (bootstraps < 1) throw DataError("bootstraps must be >= 1");
  const Predictor f = dgp_predictor(id);
  const double weight = 1.0 / static_cast<double>(bootstraps);
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(static_cast<std::size_t>(bootstraps));
  for (int b = 0; b < bootstraps; ++b) {
    const Dataset sample =
        bootstrap_sample(d, split_rng(s, static_cast<std::uint64_t>(b)));
    const Seed metric_seed =
        split_rng(s, static_cast<std::uint64_t>(bootstraps) +
                         static_cast<std::uint64_t>(b));
    atoms.emplace_back(sub_mr(f, sample, var, strat, metric_seed), weight);
  }
  return VIDistribution::from_atoms(std::move(atoms));
}

}  // namespace rid
