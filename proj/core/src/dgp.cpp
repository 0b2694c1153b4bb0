#include "rid/dgp.hpp"

#include <cmath>
#include <stdexcept>

#include "rid/errors.hpp"

namespace rid {

namespace {

// Standard Monk's-problems domains: 3, 3, 2, 3, 4, 2 levels.
constexpr int kMonkLevels[6] = {3, 3, 2, 3, 4, 2};

constexpr double kPi = 3.14159265358979323846;

int monk1_rule(std::span<const double> x) {
  return (x[0] == x[1] || x[4] == 1.0) ? 1 : 0;
}

int monk3_rule(std::span<const double> x) {
  const bool a = (x[4] == 3.0 && x[3] == 1.0);
  const bool b = (x[4] != 4.0 && x[1] != 3.0);
  return (a || b) ? 1 : 0;
}

double chen_score(std::span<const double> x) {
  return -2.0 * std::sin(x[0]) + std::max(x[1], 0.0) + x[2] + std::exp(-x[3]);
}

double friedman_score(std::span<const double> x) {
  return 10.0 * std::sin(kPi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
         10.0 * x[3] + 5.0 * x[4];
}

}  // namespace

DgpId parse_dgp(const std::string& name) {
  if (name == "monk1") return DgpId::monk1;
  if (name == "monk3") return DgpId::monk3;
  if (name == "chen") return DgpId::chen;
  if (name == "friedman") return DgpId::friedman;
  throw DataError("unknown dgp '" + name + "'");
}

std::string dgp_name(DgpId id) {
  switch (id) {
    case DgpId::monk1: return "monk1";
    case DgpId::monk3: return "monk3";
    case DgpId::chen: return "chen";
    case DgpId::friedman: return "friedman";
  }
  throw std::logic_error("unreachable");
}

std::size_t dgp_arity(DgpId id) {
  switch (id) {
    case DgpId::monk1:
    case DgpId::monk3:
    case DgpId::friedman: return 6;
    case DgpId::chen: return 10;
  }
  throw std::logic_error("unreachable");
}

std::size_t dgp_default_n(DgpId id) {
  switch (id) {
    case DgpId::monk1:
    case DgpId::monk3: return 124;
    case DgpId::chen: return 1000;
    case DgpId::friedman: return 200;
  }
  throw std::logic_error("unreachable");
}

double dgp_default_noise(DgpId id) { return id == DgpId::monk3 ? 0.05 : 0.0; }

Dataset generate(const DgpSpec& spec) {
  if (spec.n < 1) throw DataError("dgp sample count must be >= 1");
  if (spec.noise < 0.0 || spec.noise > 1.0)
    throw DataError("noise must lie in [0, 1]");
  if (spec.noise > 0.0 && spec.id != DgpId::monk3)
    throw DataError("label noise is only defined for monk3");

  const std::size_t p = dgp_arity(spec.id);
  Dataset d;
  d.columns.assign(p, std::vector<double>(spec.n));
  d.labels.resize(spec.n);
  for (std::size_t j = 0; j < p; ++j) {
    d.feature_names.push_back("X" + std::to_string(j + 1));
    const bool categorical = spec.id == DgpId::monk1 || spec.id == DgpId::monk3;
    d.feature_kinds.push_back(categorical ? FeatureKind::categorical
                                          : FeatureKind::numeric);
  }

  SplitMix64 rng(spec.seed);
  std::vector<double> row(p);
  for (std::size_t i = 0; i < spec.n; ++i) {
    switch (spec.id) {
      case DgpId::monk1:
      case DgpId::monk3:
        for (std::size_t j = 0; j < 6; ++j)
          row[j] = 1.0 + static_cast<double>(rng.next_below(kMonkLevels[j]));
        break;
      case DgpId::chen:
        for (std::size_t j = 0; j < 10; ++j) row[j] = rng.next_normal();
        break;
      case DgpId::friedman:
        for (std::size_t j = 0; j < 6; ++j) row[j] = rng.next_unit();
        break;
    }

    int y = 0;
    switch (spec.id) {
      case DgpId::monk1: y = monk1_rule(row); break;
      case DgpId::monk3: y = monk3_rule(row); break;
      case DgpId::chen: y = (chen_score(row) + rng.next_normal() >= 2.048) ? 1 : 0; break;
      case DgpId::friedman:
        y = (friedman_score(row) + rng.next_normal() >= 15.0) ? 1 : 0;
        break;
    }
    if (spec.noise > 0.0 && rng.next_unit() < spec.noise) y = 1 - y;

    for (std::size_t j = 0; j < p; ++j) d.columns[j][i] = row[j];
    d.labels[i] = static_cast<std::uint8_t>(y);
  }
  return d;
}

int dgp_predict(DgpId id, std::span<const double> row) {
  if (row.size() != dgp_arity(id))
    throw std::invalid_argument("row arity does not match dgp");
  switch (id) {
    case DgpId::monk1: return monk1_rule(row);
    case DgpId::monk3: return monk3_rule(row);
    case DgpId::chen: return chen_score(row) >= 2.048 ? 1 : 0;
    case DgpId::friedman: return friedman_score(row) >= 15.0 ? 1 : 0;
  }
  throw std::logic_error("unreachable");
}

std::vector<std::size_t> relevant_vars(DgpId id) {
  switch (id) {
    case DgpId::monk1: return {1, 2, 5};
    case DgpId::monk3: return {2, 4, 5};
    case DgpId::chen: return {1, 2, 3, 4};
    case DgpId::friedman: return {1, 2, 3, 4, 5};
  }
  throw std::logic_error("unreachable");
}

}  // namespace rid
