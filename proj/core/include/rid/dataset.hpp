#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rid/bitvector.hpp"
#include "rid/rng.hpp"

namespace rid {

enum class FeatureKind { numeric, categorical };

/// Tabular samples with binary labels. Columns are stored feature-major so
/// that resampling and column substitution stay cheap.
struct Dataset {
  std::vector<std::string> feature_names;          // p
  std::vector<FeatureKind> feature_kinds;          // p
  std::vector<std::vector<double>> columns;        // p columns of length n
  std::vector<std::uint8_t> labels;                // n, each 0 or 1

  std::size_t n_rows() const { return labels.size(); }
  std::size_t n_features() const { return columns.size(); }
  double value(std::size_t row, std::size_t var) const { return columns[var][row]; }

  /// Materializes one row (used by predictors).
  void copy_row(std::size_t row, std::vector<double>& out) const;

  /// Throws DataError if any structural invariant is violated.
  void validate() const;
};

/// One binary split feature: either a threshold test on a numeric variable
/// (bit = value <= threshold) or a level test on a categorical variable
/// (bit = round(value) == level).
struct SplitRule {
  std::size_t orig_var = 0;
  bool is_threshold = false;
  double threshold = 0.0;
  long long level = 0;

  bool applies(double v) const {
    if (is_threshold) return v <= threshold;
    return std::llround(v) == level;
  }
};

/// Provenance of binary split features back to original variables. Entries
/// for the same variable are contiguous, sorted by threshold (or level).
struct FeatureMap {
  std::vector<SplitRule> entries;

  std::size_t size() const { return entries.size(); }
  const SplitRule& operator[](std::size_t i) const { return entries[i]; }
};

/// Binarized dataset: one bit column per split feature, none constant.
struct BinDataset {
  std::size_t n = 0;
  std::vector<BitVector> columns;  // m columns of length n
  BitVector labels;
  FeatureMap map;

  std::size_t n_features() const { return columns.size(); }
  std::uint64_t fingerprint() const;
};

struct CsvOptions {
  std::string label_column;  // empty selects the last column
  std::vector<std::string> force_categorical;
  std::vector<std::string> force_numeric;
};

/// Reads a comma-separated file with a header row. Columns whose values are
/// all integers with at most 16 distinct levels are treated as categorical
/// unless overridden.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes the dataset back out with shortest round-trip number formatting,
/// label column last.
void save_csv(const Dataset& d, const std::filesystem::path& path,
              const std::string& label_name = "y");

/// Expands every variable into binary split features: one equality column per
/// observed categorical level; thresholds at midpoints of consecutive unique
/// numeric values, subsampled to at most max_thresholds evenly spaced
/// quantile ranks. Constant columns are dropped.
BinDataset binarize(const Dataset& d, std::size_t max_thresholds);

/// Resamples n rows i.i.d. with replacement; the i-th output row is the input
/// row indexed by the i-th draw of the SplitMix64 stream seeded with s.
Dataset bootstrap_sample(const Dataset& d, Seed s);

}  // namespace rid
