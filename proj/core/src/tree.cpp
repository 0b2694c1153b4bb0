#include "rid/tree.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rid/errors.hpp"

namespace rid {

using nlohmann::json;

Tree Tree::leaf(int label) {
  if (label != 0 && label != 1) throw std::invalid_argument("leaf label must be 0 or 1");
  Tree t;
  t.nodes_.push_back({-1, label, 0});
  return t;
}

Tree Tree::split(std::size_t feature, const Tree& left, const Tree& right) {
  Tree t;
  t.nodes_.reserve(1 + left.nodes_.size() + right.nodes_.size());
  t.nodes_.push_back({static_cast<std::int32_t>(feature), 0, 0});
  const std::int32_t left_base = 1;
  for (const Node& n : left.nodes_) {
    Node copy = n;
    if (copy.feature >= 0) {
      copy.left += left_base;
      copy.right += left_base;
    }
    t.nodes_.push_back(copy);
  }
  const std::int32_t right_base = static_cast<std::int32_t>(1 + left.nodes_.size());
  for (const Node& n : right.nodes_) {
    Node copy = n;
    if (copy.feature >= 0) {
      copy.left += right_base;
      copy.right += right_base;
    }
    t.nodes_.push_back(copy);
  }
  t.nodes_[0].left = left_base;
  t.nodes_[0].right = right_base;
  return t;
}

int Tree::predict_bits(const BinDataset& d, std::size_t row) const {
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const bool bit = d.columns[static_cast<std::size_t>(nodes_[at].feature)].test(row);
    at = static_cast<std::size_t>(bit ? nodes_[at].right : nodes_[at].left);
  }
  return nodes_[at].left;
}

int Tree::predict_raw(std::span<const double> row, const FeatureMap& map) const {
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const SplitRule& rule = map[static_cast<std::size_t>(nodes_[at].feature)];
    const bool bit = rule.applies(row[rule.orig_var]);
    at = static_cast<std::size_t>(bit ? nodes_[at].right : nodes_[at].left);
  }
  return nodes_[at].left;
}

std::size_t Tree::leaf_count() const {
  std::size_t c = 0;
  for (const Node& n : nodes_)
    if (n.feature < 0) ++c;
  return c;
}

std::size_t Tree::depth() const {
  // Depth via iterative walk; node i's children always sit after i.
  std::vector<std::size_t> depth_of(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature < 0) {
      best = std::max(best, depth_of[i]);
    } else {
      depth_of[static_cast<std::size_t>(nodes_[i].left)] = depth_of[i] + 1;
      depth_of[static_cast<std::size_t>(nodes_[i].right)] = depth_of[i] + 1;
    }
  }
  return best;
}

std::vector<std::size_t> Tree::used_features() const {
  std::vector<std::size_t> fs;
  for (const Node& n : nodes_)
    if (n.feature >= 0) fs.push_back(static_cast<std::size_t>(n.feature));
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  return fs;
}

std::vector<std::size_t> Tree::used_variables(const FeatureMap& map) const {
  std::vector<std::size_t> vars;
  for (std::size_t f : used_features()) vars.push_back(map[f].orig_var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

namespace {

void key_walk(const std::vector<Tree::Node>& nodes, std::size_t at, std::string& out) {
  const Tree::Node& n = nodes[at];
  if (n.feature < 0) {
    out += n.left ? 'P' : 'N';
    return;
  }
  // Fixed-width feature digits keep lexicographic key order equal to
  // (feature, left, right) structural order.
  char digits[8];
  std::snprintf(digits, sizeof(digits), "%06d", n.feature);
  out += '(';
  out += digits;
  out += ' ';
  key_walk(nodes, static_cast<std::size_t>(n.left), out);
  key_walk(nodes, static_cast<std::size_t>(n.right), out);
  out += ')';
}

json node_json(const std::vector<Tree::Node>& nodes, std::size_t at) {
  const Tree::Node& n = nodes[at];
  if (n.feature < 0) return json{{"leaf", n.left}};
  return json{{"feature", n.feature},
              {"left", node_json(nodes, static_cast<std::size_t>(n.left))},
              {"right", node_json(nodes, static_cast<std::size_t>(n.right))}};
}

Tree node_from_json(const json& j) {
  if (j.contains("leaf")) {
    const int label = j.at("leaf").get<int>();
    return Tree::leaf(label);
  }
  if (!j.contains("feature") || !j.contains("left") || !j.contains("right"))
    throw DataError("malformed tree node");
  const auto feature = j.at("feature").get<std::int64_t>();
  if (feature < 0) throw DataError("negative feature index in tree node");
  return Tree::split(static_cast<std::size_t>(feature), node_from_json(j.at("left")),
                     node_from_json(j.at("right")));
}

}  // namespace

std::string Tree::canonical_key() const {
  std::string out;
  out.reserve(nodes_.size() * 4);
  key_walk(nodes_, 0, out);
  return out;
}

std::string Tree::to_json() const { return node_json(nodes_, 0).dump(); }

Tree Tree::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed tree JSON: ") + e.what());
  }
  return node_from_json(j);
}

std::size_t misclassified(const Tree& t, const BinDataset& d) {
  std::size_t errors = 0;
  for (std::size_t i = 0; i < d.n; ++i)
    errors += static_cast<std::size_t>(t.predict_bits(d, i) != int(d.labels.test(i)));
  return errors;
}

double objective(const Tree& t, const BinDataset& d, double lambda) {
  return static_cast<double>(misclassified(t, d)) / static_cast<double>(d.n) +
         lambda * static_cast<double>(t.leaf_count());
}

}  // namespace rid
