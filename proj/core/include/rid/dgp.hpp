#pragma once

#include <span>
#include <string>
#include <vector>

#include "rid/dataset.hpp"
#include "rid/rng.hpp"

namespace rid {

/// The four synthetic data generating processes used by the experiment
/// drivers. Each doubles as a deterministic predictor (noise term dropped).
enum class DgpId { monk1, monk3, chen, friedman };

DgpId parse_dgp(const std::string& name);
std::string dgp_name(DgpId id);

struct DgpSpec {
  DgpId id = DgpId::monk1;
  std::size_t n = 0;
  double noise = 0.0;  // label-flip probability; only monk3 admits > 0
  Seed seed = 0;
};

/// Number of covariates the process draws.
std::size_t dgp_arity(DgpId id);

/// Conventional sample count (monk: 124, chen: 1000, friedman: 200).
std::size_t dgp_default_n(DgpId id);

/// Label-flip probability the process is normally run with.
double dgp_default_noise(DgpId id);

/// Samples a dataset from the process; deterministic in the spec.
Dataset generate(const DgpSpec& spec);

/// Evaluates the noiseless decision rule of the process on one row.
int dgp_predict(DgpId id, std::span<const double> row);

/// 1-based indices of the variables the process actually reads.
std::vector<std::size_t> relevant_vars(DgpId id);

}  // namespace rid
