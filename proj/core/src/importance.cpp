#include "rid/importance.hpp"

#include <memory>
#include <numeric>
#include <stdexcept>

#include "rid/errors.hpp"

namespace rid {

Predictor tree_predictor(Tree t, FeatureMap map) {
  auto shared = std::make_shared<std::pair<Tree, FeatureMap>>(std::move(t), std::move(map));
  return [shared](std::span<const double> row) {
    return shared->first.predict_raw(row, shared->second);
  };
}

Predictor dgp_predictor(DgpId id) {
  return [id](std::span<const double> row) { return dgp_predict(id, row); };
}

MrStrategy MrStrategy::permutations(std::size_t count) {
  if (count == 0) throw std::invalid_argument("permutation count must be positive");
  MrStrategy s;
  s.kind = Kind::permutations;
  s.permutation_count = count;
  return s;
}

std::string MrStrategy::to_string() const {
  if (kind == Kind::e_divide) return "e_divide";
  return "perm:" + std::to_string(permutation_count);
}

MrStrategy MrStrategy::parse(const std::string& text) {
  if (text == "e_divide") return e_divide();
  if (text.rfind("perm:", 0) == 0) {
    const std::string count = text.substr(5);
    try {
      return permutations(std::stoull(count));
    } catch (const std::exception&) {
      throw DataError("bad permutation count in strategy '" + text + "'");
    }
  }
  throw DataError("unknown strategy '" + text + "' (want e_divide or perm:K)");
}

namespace {

std::size_t errors_on_rows(const Predictor& f, const Dataset& d, std::size_t begin,
                           std::size_t end, std::vector<double>& row) {
  std::size_t errors = 0;
  for (std::size_t i = begin; i < end; ++i) {
    d.copy_row(i, row);
    errors += static_cast<std::size_t>(f(row) != int(d.labels[i]));
  }
  return errors;
}

// Errors over [begin, end) with column var substituted positionally from the
// rows [begin + shift, end + shift).
std::size_t errors_switched(const Predictor& f, const Dataset& d, std::size_t var,
                            std::size_t begin, std::size_t end,
                            std::ptrdiff_t shift, std::vector<double>& row) {
  std::size_t errors = 0;
  for (std::size_t i = begin; i < end; ++i) {
    d.copy_row(i, row);
    row[var] = d.columns[var][static_cast<std::size_t>(
        static_cast<std::ptrdiff_t>(i) + shift)];
    errors += static_cast<std::size_t>(f(row) != int(d.labels[i]));
  }
  return errors;
}

}  // namespace

double zero_one_loss(const Predictor& f, const Dataset& d) {
  std::vector<double> row;
  const std::size_t errors = errors_on_rows(f, d, 0, d.n_rows(), row);
  return static_cast<double>(errors) / static_cast<double>(d.n_rows());
}

double loss_switch(const Predictor& f, const Dataset& d, std::size_t var,
                   const MrStrategy& strat, Seed s) {
  if (var >= d.n_features()) throw std::invalid_argument("variable index out of range");
  const std::size_t n = d.n_rows();
  std::vector<double> row;

  if (strat.kind == MrStrategy::Kind::e_divide) {
    if (n < 2) throw DataError("e_divide needs at least two rows");
    const std::size_t h = n / 2;
    const auto hs = static_cast<std::ptrdiff_t>(h);
    const std::size_t err1 = errors_switched(f, d, var, 0, h, hs, row);
    const std::size_t err2 = errors_switched(f, d, var, h, 2 * h, -hs, row);
    return static_cast<double>(err1 + err2) / (2.0 * static_cast<double>(h));
  }

  SplitMix64 rng(s);
  std::vector<double> original = d.columns[var];
  std::size_t total_errors = 0;
  Dataset scratch = d;
  for (std::size_t k = 0; k < strat.permutation_count; ++k) {
    std::vector<double> shuffled = original;
    rng.shuffle(shuffled);
    scratch.columns[var] = std::move(shuffled);
    total_errors += errors_on_rows(f, scratch, 0, n, row);
  }
  return static_cast<double>(total_errors) /
         (static_cast<double>(strat.permutation_count) * static_cast<double>(n));
}

double sub_mr(const Predictor& f, const Dataset& d, std::size_t var,
              const MrStrategy& strat, Seed s) {
  const double switched = loss_switch(f, d, var, strat, s);
  std::vector<double> row;
  if (strat.kind == MrStrategy::Kind::e_divide) {
    const std::size_t h = d.n_rows() / 2;
    const std::size_t base_errors = errors_on_rows(f, d, 0, 2 * h, row);
    return switched - static_cast<double>(base_errors) / (2.0 * static_cast<double>(h));
  }
  return switched - zero_one_loss(f, d);
}

VIMetric make_metric(const std::string& name, const MrStrategy& strat) {
  if (name != "sub_mr") throw DataError("unknown metric '" + name + "'");
  return [strat](const Predictor& f, const Dataset& d, std::size_t var, Seed s) {
    return sub_mr(f, d, var, strat, s);
  };
}

}  // namespace rid
