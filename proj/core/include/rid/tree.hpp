#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rid/dataset.hpp"

namespace rid {

/// Immutable sparse decision tree over binary split features. Splits send
/// bit = 0 left and bit = 1 right; no feature repeats along a path. Stored as
/// a flat node arena with the root at index 0.
class Tree {
 public:
  struct Node {
    std::int32_t feature;  // -1 for a leaf
    std::int32_t left;     // leaf: the label; split: child index
    std::int32_t right;    // split: child index

    bool operator==(const Node&) const = default;
  };

  static Tree leaf(int label);
  static Tree split(std::size_t feature, const Tree& left, const Tree& right);

  bool is_leaf() const { return nodes_[0].feature < 0; }
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Label reached by following bits of a binarized row.
  int predict_bits(const BinDataset& d, std::size_t row) const;

  /// Label reached by applying split rules to a raw feature row.
  int predict_raw(std::span<const double> row, const FeatureMap& map) const;

  std::size_t leaf_count() const;
  std::size_t depth() const;

  /// Sorted list of distinct binary features referenced by the tree.
  std::vector<std::size_t> used_features() const;

  /// Sorted list of distinct original variables referenced through the map.
  std::vector<std::size_t> used_variables(const FeatureMap& map) const;

  /// Canonical serialization; equal strings iff structurally equal trees.
  std::string canonical_key() const;

  /// Compact JSON node encoding: {"leaf":0|1} or
  /// {"feature":m,"left":...,"right":...}.
  std::string to_json() const;
  static Tree from_json(const std::string& text);

  bool operator==(const Tree& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<Node> nodes_;
};

/// Regularized objective: misclassified fraction plus lambda per leaf.
double objective(const Tree& t, const BinDataset& d, double lambda);

/// Number of rows the tree labels incorrectly.
std::size_t misclassified(const Tree& t, const BinDataset& d);

}  // namespace rid
