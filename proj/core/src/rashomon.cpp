#include "rid/rashomon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "rid/errors.hpp"

namespace rid {

namespace {

constexpr double kTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct BestValue {
  double value;
  bool exact;
};

/// Memoized branch-and-bound solver over (sample support, depth budget)
/// subproblems, plus a budget-propagating enumerator of every canonical tree
/// within an absolute objective budget. Subtree costs are carried as exact
/// integer (errors, leaves) pairs; doubles are derived through one canonical
/// formula so the enumerator and the public objective() agree bit for bit.
class Solver {
 public:
  Solver(const BinDataset& d, double lambda, int depth, std::size_t max_models)
      : data_(d),
        lambda_(lambda),
        depth_(depth),
        max_models_(max_models),
        n_(d.n),
        m_(d.columns.size()) {
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
    full_ = BitVector(n_, true);
    pos_ = d.labels;
    neg_ = BitVector(n_);
    BitVector::and_not_into(neg_, full_, d.labels);
    build_equivalence_classes();
    store_.push_back({-1, 0, 0});  // id 0: leaf predicting 0
    store_.push_back({-1, 1, 0});  // id 1: leaf predicting 1
  }

  double cost_value(std::uint32_t errors, std::uint32_t leaves) const {
    return static_cast<double>(errors) / static_cast<double>(n_) +
           lambda_ * static_cast<double>(leaves);
  }

  double solve_min() { return best(full_, depth_, kInf).value; }

  struct EnumItem {
    std::uint32_t id;
    std::uint32_t errors;
    std::uint32_t leaves;
    double value;
  };

  /// All trees on the full support with objective <= budget (+kTol).
  const std::vector<EnumItem>& enumerate_root(double budget) {
    return enumerate(full_, depth_, budget);
  }

  std::vector<RashomonDag::Node> take_nodes() {
    std::vector<RashomonDag::Node> nodes;
    nodes.reserve(store_.size());
    for (const StoreNode& n : store_) nodes.push_back({n.feature, n.left, n.right});
    return nodes;
  }

 private:
  struct StoreNode {
    std::int32_t feature;
    std::uint32_t left;
    std::uint32_t right;
  };

  // ---- equivalent-points bound -------------------------------------------

  void build_equivalence_classes() {
    // Rows identical on every split feature but carrying both labels force
    // misclassifications no tree can avoid.
    std::vector<std::vector<std::uint64_t>> sig(n_);
    const std::size_t sig_words = (m_ + 63) / 64;
    for (std::size_t i = 0; i < n_; ++i) {
      sig[i].assign(sig_words, 0);
      for (std::size_t f = 0; f < m_; ++f)
        if (data_.columns[f].test(i)) sig[i][f >> 6] |= 1ULL << (f & 63);
    }
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
    std::size_t start = 0;
    while (start < n_) {
      std::size_t end = start + 1;
      while (end < n_ && sig[order[end]] == sig[order[start]]) ++end;
      bool has_pos = false, has_neg = false;
      for (std::size_t k = start; k < end; ++k)
        (data_.labels.test(order[k]) ? has_pos : has_neg) = true;
      if (has_pos && has_neg) {
        BitVector cls_pos(n_), cls_neg(n_);
        for (std::size_t k = start; k < end; ++k) {
          const std::size_t row = order[k];
          if (data_.labels.test(row))
            cls_pos.set(row, true);
          else
            cls_neg.set(row, true);
        }
        mixed_.emplace_back(std::move(cls_pos), std::move(cls_neg));
      }
      start = end;
    }
  }

  std::uint32_t equiv_errors(const BitVector& support) const {
    std::size_t total = 0;
    for (const auto& [cls_pos, cls_neg] : mixed_)
      total += std::min(support.count_and(cls_pos), support.count_and(cls_neg));
    return static_cast<std::uint32_t>(total);
  }

  /// Admissible lower bound over `support` with depth budget d.
  double lower_bound(const BitVector& support, std::size_t minority, int d) const {
    const double leaf = cost_value(static_cast<std::uint32_t>(minority), 1);
    if (d == 0) return leaf;
    const double split =
        mixed_.empty() ? cost_value(0, 2) : cost_value(equiv_errors(support), 2);
    return std::min(leaf, split);
  }

  // ---- best-value search ---------------------------------------------------

  struct BestRec {
    std::uint64_t h2;
    BitVector support;
    double value;
    bool exact;
  };

  BestRec* find_best_rec(std::uint64_t key, std::uint64_t h2,
                         const BitVector& support) {
    auto it = best_memo_.find(key);
    if (it == best_memo_.end()) return nullptr;
    for (auto& rec : it->second)
      if (rec->h2 == h2 && rec->support == support) return rec.get();
    return nullptr;
  }

  static std::uint64_t best_key(std::uint64_t h1, int d) {
    return h1 ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(d + 1));
  }

  /// Exact optimum whenever it is <= ub (+kTol); otherwise a certified lower
  /// bound greater than ub.
  BestValue best(const BitVector& support, int d, double ub) {
    const std::size_t np = support.count_and(pos_);
    const std::size_t nn = support.count_and(neg_);
    const std::size_t minority = std::min(np, nn);
    const double leaf = cost_value(static_cast<std::uint32_t>(minority), 1);
    if (d == 0) return {leaf, true};

    const double lb = lower_bound(support, minority, d);
    if (lb > ub + kTol) return {lb, false};

    const auto h = support.hash128();
    const std::uint64_t key = best_key(h.first, d);
    BestRec* rec = find_best_rec(key, h.second, support);
    if (rec) {
      if (rec->exact) return {rec->value, true};
      if (rec->value > ub + kTol) return {rec->value, false};
    }

    const BestValue result = (d <= 2) ? best_shallow(support, np, nn, d)
                                      : best_deep(support, np, nn, d, ub);

    if (!rec) rec = find_best_rec(key, h.second, support);  // recursion may add
    if (rec) {
      if (result.exact || result.value > rec->value) {
        rec->value = result.value;
        rec->exact = result.exact;
      }
    } else {
      best_memo_[key].push_back(std::make_unique<BestRec>(
          BestRec{h.second, support, result.value, result.exact}));
    }
    return result;
  }

  /// Exact depth-1 optimum from split counts alone.
  double best_depth1(const BitVector& sup_pos, const BitVector& sup_neg,
                     std::size_t np, std::size_t nn) const {
    double best_val = cost_value(static_cast<std::uint32_t>(std::min(np, nn)), 1);
    if (cost_value(0, 2) >= best_val - kTol) return best_val;  // splits can't win
    for (std::size_t f = 0; f < m_; ++f) {
      const std::size_t pin = sup_pos.count_and(data_.columns[f]);
      const std::size_t nin = sup_neg.count_and(data_.columns[f]);
      const std::size_t pout = np - pin;
      const std::size_t nout = nn - nin;
      if (pin + nin == 0 || pout + nout == 0) continue;
      const std::uint32_t errs =
          static_cast<std::uint32_t>(std::min(pin, nin) + std::min(pout, nout));
      best_val = std::min(best_val, cost_value(errs, 2));
    }
    return best_val;
  }

  /// Exact solve for depth budgets 1 and 2.
  BestValue best_shallow(const BitVector& support, std::size_t np, std::size_t nn,
                         int d) {
    BitVector sup_pos(n_), sup_neg(n_);
    BitVector::and_into(sup_pos, support, pos_);
    BitVector::and_into(sup_neg, support, neg_);
    if (d == 1) return {best_depth1(sup_pos, sup_neg, np, nn), true};

    double best_val = cost_value(static_cast<std::uint32_t>(std::min(np, nn)), 1);
    if (cost_value(0, 2) >= best_val - kTol) return {best_val, true};
    BitVector lp(n_), ln(n_), rp(n_), rn(n_);
    for (std::size_t f = 0; f < m_; ++f) {
      BitVector::and_into(rp, sup_pos, data_.columns[f]);
      BitVector::and_into(rn, sup_neg, data_.columns[f]);
      const std::size_t rps = rp.count(), rns = rn.count();
      const std::size_t lps = np - rps, lns = nn - rns;
      if (rps + rns == 0 || lps + lns == 0) continue;
      BitVector::and_not_into(lp, sup_pos, data_.columns[f]);
      BitVector::and_not_into(ln, sup_neg, data_.columns[f]);
      const double left = best_depth1(lp, ln, lps, lns);
      const double right = best_depth1(rp, rn, rps, rns);
      best_val = std::min(best_val, left + right);
    }
    return {best_val, true};
  }

  /// Greedy descent; only used to seed incumbents. The returned value is
  /// always achieved by some tree.
  double greedy_value(const BitVector& support, std::size_t np, std::size_t nn,
                      int d) {
    const double leaf = cost_value(static_cast<std::uint32_t>(std::min(np, nn)), 1);
    if (d == 0 || np == 0 || nn == 0) return leaf;
    BitVector sup_pos(n_), sup_neg(n_);
    BitVector::and_into(sup_pos, support, pos_);
    BitVector::and_into(sup_neg, support, neg_);
    std::size_t best_f = m_;
    std::size_t best_err = std::numeric_limits<std::size_t>::max();
    for (std::size_t f = 0; f < m_; ++f) {
      const std::size_t pin = sup_pos.count_and(data_.columns[f]);
      const std::size_t nin = sup_neg.count_and(data_.columns[f]);
      const std::size_t pout = np - pin;
      const std::size_t nout = nn - nin;
      if (pin + nin == 0 || pout + nout == 0) continue;
      const std::size_t errs = std::min(pin, nin) + std::min(pout, nout);
      if (errs < best_err) {
        best_err = errs;
        best_f = f;
      }
    }
    if (best_f == m_) return leaf;
    BitVector left(n_), right(n_);
    BitVector::and_not_into(left, support, data_.columns[best_f]);
    BitVector::and_into(right, support, data_.columns[best_f]);
    const std::size_t lp = left.count_and(pos_), ln = left.count_and(neg_);
    const std::size_t rp = np - lp, rn = nn - ln;
    return std::min(leaf, greedy_value(left, lp, ln, d - 1) +
                              greedy_value(right, rp, rn, d - 1));
  }

  BestValue best_deep(const BitVector& support, std::size_t np, std::size_t nn,
                      int d, double ub) {
    const double leaf = cost_value(static_cast<std::uint32_t>(std::min(np, nn)), 1);
    double best_val = std::min(leaf, greedy_value(support, np, nn, d));
    double ub_local = std::min(ub, best_val);
    double min_excluded = kInf;

    BitVector sup_pos(n_), sup_neg(n_);
    BitVector::and_into(sup_pos, support, pos_);
    BitVector::and_into(sup_neg, support, neg_);

    // Try features in order of the misclassification a depth-1 split leaves.
    std::vector<std::pair<std::size_t, std::size_t>> order;
    order.reserve(m_);
    for (std::size_t f = 0; f < m_; ++f) {
      const std::size_t pin = sup_pos.count_and(data_.columns[f]);
      const std::size_t nin = sup_neg.count_and(data_.columns[f]);
      const std::size_t pout = np - pin;
      const std::size_t nout = nn - nin;
      if (pin + nin == 0 || pout + nout == 0) continue;
      order.emplace_back(std::min(pin, nin) + std::min(pout, nout), f);
    }
    std::sort(order.begin(), order.end());

    BitVector left(n_), right(n_);
    for (const auto& [split_err, f] : order) {
      BitVector::and_not_into(left, support, data_.columns[f]);
      BitVector::and_into(right, support, data_.columns[f]);
      const std::size_t lp = left.count_and(pos_), ln = left.count_and(neg_);
      const std::size_t rp = np - lp, rn = nn - ln;
      const double lb_left = lower_bound(left, std::min(lp, ln), d - 1);
      const double lb_right = lower_bound(right, std::min(rp, rn), d - 1);
      if (lb_left + lb_right > ub_local + kTol) {
        min_excluded = std::min(min_excluded, lb_left + lb_right);
        continue;
      }
      const BestValue bl = best(left, d - 1, ub_local - lb_right);
      if (bl.value + lb_right > ub_local + kTol) {
        min_excluded = std::min(min_excluded, bl.value + lb_right);
        continue;
      }
      const BestValue br = best(right, d - 1, ub_local - bl.value);
      const double total = bl.value + br.value;
      if (total > ub_local + kTol) {
        min_excluded = std::min(min_excluded, total);
        continue;
      }
      // Surviving here certifies both children exact.
      best_val = std::min(best_val, total);
      ub_local = std::min(ub_local, best_val);
    }

    if (best_val <= ub + kTol) return {best_val, true};
    return {std::min(best_val, min_excluded), false};
  }

  // ---- enumeration ----------------------------------------------------------

  struct EnumRec {
    std::uint64_t h2;
    BitVector support;
    double budget;
    std::vector<EnumItem> items;  // sorted ascending by (value, id)
  };

  static std::uint64_t enum_key(std::uint64_t h1, int d) {
    return h1 ^ (0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(d + 1));
  }

  EnumRec* find_enum_rec(std::uint64_t key, std::uint64_t h2,
                         const BitVector& support) {
    auto it = enum_memo_.find(key);
    if (it == enum_memo_.end()) return nullptr;
    for (auto& rec : it->second)
      if (rec->h2 == h2 && rec->support == support) return rec.get();
    return nullptr;
  }

  std::uint32_t intern_split(std::size_t feature, std::uint32_t l, std::uint32_t r) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(feature) * 0x9E3779B97F4A7C15ULL) ^
        (static_cast<std::uint64_t>(l) << 32) ^ r;
    auto& bucket = store_index_[key];
    for (std::uint32_t id : bucket) {
      const StoreNode& nd = store_[id];
      if (nd.feature == static_cast<std::int32_t>(feature) && nd.left == l &&
          nd.right == r)
        return id;
    }
    const std::uint32_t id = static_cast<std::uint32_t>(store_.size());
    store_.push_back({static_cast<std::int32_t>(feature), l, r});
    bucket.push_back(id);
    return id;
  }

  static std::size_t count_within(const std::vector<EnumItem>& items, double budget) {
    std::size_t lo = 0, hi = items.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (items[mid].value <= budget + kTol)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  /// The complete sorted list of subtrees on (support, d) with value within
  /// `budget`. The returned reference stays valid while the recursion that
  /// requested it runs: records live on the heap, and a record can only be
  /// rebuilt by a call on its own (support, d), which cannot recur into
  /// itself because children are strict nonempty subsets.
  const std::vector<EnumItem>& enumerate(const BitVector& support, int d,
                                         double budget) {
    const auto h = support.hash128();
    const std::uint64_t key = enum_key(h.first, d);
    if (EnumRec* rec = find_enum_rec(key, h.second, support)) {
      if (rec->budget >= budget - kTol) return rec->items;
      std::vector<EnumItem> items = build_items(support, d, budget);
      rec->budget = budget;
      rec->items = std::move(items);
      return rec->items;
    }
    std::vector<EnumItem> items = build_items(support, d, budget);
    auto& bucket = enum_memo_[key];  // recursion finished; safe to touch the map
    bucket.push_back(std::make_unique<EnumRec>(
        EnumRec{h.second, support, budget, std::move(items)}));
    return bucket.back()->items;
  }

  std::vector<EnumItem> build_items(const BitVector& support, int d, double budget) {
    std::vector<EnumItem> items;
    const std::uint32_t np = static_cast<std::uint32_t>(support.count_and(pos_));
    const std::uint32_t nn = static_cast<std::uint32_t>(support.count_and(neg_));
    if (cost_value(np, 1) <= budget + kTol)
      items.push_back({0, np, 1, cost_value(np, 1)});  // leaf 0 errs on positives
    if (cost_value(nn, 1) <= budget + kTol)
      items.push_back({1, nn, 1, cost_value(nn, 1)});

    if (d > 0) {
      BitVector left(n_), right(n_);
      for (std::size_t f = 0; f < m_; ++f) {
        BitVector::and_not_into(left, support, data_.columns[f]);
        BitVector::and_into(right, support, data_.columns[f]);
        if (left.none() || right.none()) continue;
        const std::size_t lp = left.count_and(pos_), ln = left.count_and(neg_);
        const std::size_t rp = np - lp, rn = nn - ln;
        const double lb_right = lower_bound(right, std::min(rp, rn), d - 1);
        const BestValue bl = best(left, d - 1, budget - lb_right);
        if (bl.value + lb_right > budget + kTol) continue;
        const BestValue br = best(right, d - 1, budget - bl.value);
        if (bl.value + br.value > budget + kTol) continue;

        const std::vector<EnumItem>& left_items =
            enumerate(left, d - 1, budget - br.value);
        const std::size_t left_n = count_within(left_items, budget - br.value);
        const std::vector<EnumItem>& right_items =
            enumerate(right, d - 1, budget - bl.value);
        for (std::size_t li = 0; li < left_n; ++li) {
          const EnumItem& lt = left_items[li];
          const std::size_t right_n = count_within(right_items, budget - lt.value);
          for (std::size_t ri = 0; ri < right_n; ++ri) {
            const EnumItem& rt = right_items[ri];
            const std::uint32_t errors = lt.errors + rt.errors;
            const std::uint32_t leaves = lt.leaves + rt.leaves;
            const double value = cost_value(errors, leaves);
            if (value > budget + kTol) continue;
            items.push_back({intern_split(f, lt.id, rt.id), errors, leaves, value});
            if (items.size() > max_models_)
              throw ResourceError("rashomon set too large", items.size());
          }
        }
      }
    }

    std::sort(items.begin(), items.end(), [](const EnumItem& a, const EnumItem& b) {
      if (a.value != b.value) return a.value < b.value;
      return a.id < b.id;
    });
    return items;
  }

  const BinDataset& data_;
  double lambda_;
  int depth_;
  std::size_t max_models_;
  std::size_t n_;
  std::size_t m_;
  BitVector full_, pos_, neg_;
  std::vector<std::pair<BitVector, BitVector>> mixed_;
  std::vector<StoreNode> store_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> store_index_;
  std::unordered_map<std::uint64_t, std::vector<std::unique_ptr<BestRec>>> best_memo_;
  std::unordered_map<std::uint64_t, std::vector<std::unique_ptr<EnumRec>>> enum_memo_;
};

// Mirrors the lexicographic order of Tree::canonical_key (splits open with a
// parenthesis and carry fixed-width feature digits, so string order means
// split-first, then numeric feature, then left and right subkeys).
bool structural_less(const std::vector<RashomonDag::Node>& nodes, std::uint32_t a,
                     std::uint32_t b) {
  if (a == b) return false;
  const RashomonDag::Node& na = nodes[a];
  const RashomonDag::Node& nb = nodes[b];
  const bool leaf_a = na.feature < 0;
  const bool leaf_b = nb.feature < 0;
  if (leaf_a != leaf_b) return leaf_b;  // splits sort before leaves
  if (leaf_a) return na.left < nb.left;
  if (na.feature != nb.feature) return na.feature < nb.feature;
  if (structural_less(nodes, na.left, nb.left)) return true;
  if (structural_less(nodes, nb.left, na.left)) return false;
  return structural_less(nodes, na.right, nb.right);
}

}  // namespace

Tree RashomonDag::materialize(std::uint32_t root) const {
  const Node& node = nodes[root];
  if (node.feature < 0) return Tree::leaf(static_cast<int>(node.left));
  return Tree::split(static_cast<std::size_t>(node.feature), materialize(node.left),
                     materialize(node.right));
}

double min_objective(const BinDataset& d, double lambda, int depth) {
  Solver solver(d, lambda, depth, std::numeric_limits<std::size_t>::max());
  return solver.solve_min();
}

RashomonDag enumerate_rset_dag(const BinDataset& d, double epsilon, double lambda,
                               int depth, std::size_t max_models) {
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
  Solver solver(d, lambda, depth, max_models);
  const double min_obj = solver.solve_min();
  const auto& items = solver.enumerate_root(min_obj + epsilon);
  if (items.size() > max_models)
    throw ResourceError("rashomon set too large", items.size());

  RashomonDag dag;
  dag.min_objective = min_obj;
  dag.epsilon = epsilon;
  dag.lambda = lambda;
  dag.depth_bound = depth;
  dag.dataset_fingerprint = d.fingerprint();
  dag.map = d.map;
  dag.nodes = solver.take_nodes();

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].value != items[b].value) return items[a].value < items[b].value;
    return structural_less(dag.nodes, items[a].id, items[b].id);
  });
  dag.roots.reserve(items.size());
  dag.objectives.reserve(items.size());
  dag.errors.reserve(items.size());
  for (std::size_t idx : order) {
    dag.roots.push_back(items[idx].id);
    dag.objectives.push_back(items[idx].value);
    dag.errors.push_back(items[idx].errors);
  }
  return dag;
}

RashomonSet enumerate_rset(const BinDataset& d, double epsilon, double lambda,
                           int depth, std::size_t max_models) {
  const RashomonDag dag = enumerate_rset_dag(d, epsilon, lambda, depth, max_models);
  RashomonSet rset;
  rset.min_objective = dag.min_objective;
  rset.epsilon = dag.epsilon;
  rset.lambda = dag.lambda;
  rset.depth_bound = dag.depth_bound;
  rset.dataset_fingerprint = dag.dataset_fingerprint;
  rset.map = dag.map;
  rset.objectives = dag.objectives;
  rset.trees.reserve(dag.size());
  for (std::uint32_t root : dag.roots) rset.trees.push_back(dag.materialize(root));
  return rset;
}

Interval mcr(const RashomonSet& rset, const Dataset& d, std::size_t var,
             const VIMetric& metric, Seed s) {
  if (rset.trees.empty()) throw std::logic_error("mcr on an empty rashomon set");
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const Tree& t : rset.trees) {
    const double v = metric(tree_predictor(t, rset.map), d, var, s);
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

std::vector<std::vector<double>> vic(const RashomonSet& rset, const Dataset& d,
                                     const VIMetric& metric, Seed s) {
  std::vector<std::vector<double>> values(d.n_features());
  for (auto& v : values) v.reserve(rset.size());
  for (const Tree& t : rset.trees) {
    const Predictor f = tree_predictor(t, rset.map);
    for (std::size_t var = 0; var < d.n_features(); ++var)
      values[var].push_back(metric(f, d, var, s));
  }
  return values;
}

}  // namespace rid
