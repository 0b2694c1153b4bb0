#include "rid/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rid/errors.hpp"

namespace rid {

void Dataset::copy_row(std::size_t row, std::vector<double>& out) const {
  out.resize(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) out[j] = columns[j][row];
}

void Dataset::validate() const {
  const std::size_t p = columns.size();
  if (p == 0) throw DataError("dataset has no features");
  if (labels.empty()) throw DataError("dataset has no rows");
  if (feature_names.size() != p || feature_kinds.size() != p)
    throw DataError("dataset metadata size mismatch");
  for (const auto& col : columns)
    if (col.size() != labels.size()) throw DataError("ragged dataset columns");
  for (std::uint8_t y : labels)
    if (y != 0 && y != 1) throw DataError("label not binary");
  for (std::size_t j = 0; j < p; ++j) {
    if (feature_kinds[j] != FeatureKind::categorical) continue;
    for (double v : columns[j])
      if (v != std::nearbyint(v))
        throw DataError("categorical column '" + feature_names[j] +
                        "' contains a non-integer value");
  }
}

std::uint64_t BinDataset::fingerprint() const {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(0x8000000080003ULL ^ n);
  auto absorb = [&](const BitVector& bv) {
    for (std::size_t i = 0; i < bv.word_count(); ++i) h = mix(h ^ bv.words()[i]);
  };
  absorb(labels);
  for (const auto& col : columns) absorb(col);
  return h;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw DataError("non-numeric cell '" + cell + "' on line " +
                    std::to_string(line_no));
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_integral_column(const std::vector<double>& col) {
  for (double v : col)
    if (v != std::nearbyint(v)) return false;
  return true;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file '" + path.string() + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.empty()) throw DataError("empty header row");

  std::size_t label_idx = header.size() - 1;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end())
      throw DataError("label column '" + options.label_column + "' not found");
    label_idx = static_cast<std::size_t>(it - header.begin());
  }
  if (header.size() < 2) throw DataError("need at least one feature column");

  std::vector<std::vector<double>> cells(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> row = split_line(line);
    if (row.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t j = 0; j < row.size(); ++j)
      cells[j].push_back(parse_cell(row[j], line_no));
  }
  if (cells[0].empty()) throw DataError("dataset has no rows");

  Dataset d;
  d.labels.reserve(cells[label_idx].size());
  for (double v : cells[label_idx]) {
    if (v != 0.0 && v != 1.0) throw DataError("label not binary");
    d.labels.push_back(static_cast<std::uint8_t>(v));
  }

  auto forced = [](const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
  };

  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == label_idx) continue;
    d.feature_names.push_back(header[j]);
    FeatureKind kind = FeatureKind::numeric;
    if (forced(options.force_categorical, header[j])) {
      kind = FeatureKind::categorical;
    } else if (!forced(options.force_numeric, header[j]) && is_integral_column(cells[j])) {
      std::set<double> levels(cells[j].begin(), cells[j].end());
      if (levels.size() <= 16) kind = FeatureKind::categorical;
    }
    d.feature_kinds.push_back(kind);
    d.columns.push_back(std::move(cells[j]));
  }
  d.validate();
  return d;
}

void save_csv(const Dataset& d, const std::filesystem::path& path,
              const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (std::size_t j = 0; j < d.n_features(); ++j) out << d.feature_names[j] << ',';
  out << label_name << '\n';
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (std::size_t j = 0; j < d.n_features(); ++j)
      out << format_double(d.columns[j][i]) << ',';
    out << int(d.labels[i]) << '\n';
  }
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

BinDataset binarize(const Dataset& d, std::size_t max_thresholds) {
  d.validate();
  if (max_thresholds == 0) throw DataError("max_thresholds must be positive");
  const std::size_t n = d.n_rows();

  BinDataset b;
  b.n = n;
  b.labels = BitVector(n);
  for (std::size_t i = 0; i < n; ++i) b.labels.set(i, d.labels[i] != 0);

  for (std::size_t var = 0; var < d.n_features(); ++var) {
    const auto& col = d.columns[var];
    std::vector<SplitRule> rules;
    if (d.feature_kinds[var] == FeatureKind::categorical) {
      std::set<long long> levels;
      for (double v : col) levels.insert(std::llround(v));
      for (long long level : levels) {
        SplitRule r;
        r.orig_var = var;
        r.is_threshold = false;
        r.level = level;
        rules.push_back(r);
      }
    } else {
      std::vector<double> uniq(col);
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      std::vector<double> candidates;
      for (std::size_t i = 0; i + 1 < uniq.size(); ++i)
        candidates.push_back(uniq[i] + (uniq[i + 1] - uniq[i]) / 2.0);
      std::vector<double> chosen;
      if (candidates.size() <= max_thresholds) {
        chosen = candidates;
      } else {
        // Evenly spaced quantile ranks over the candidate list, endpoints kept.
        const std::size_t k = candidates.size();
        for (std::size_t t = 0; t < max_thresholds; ++t) {
          const double pos = (max_thresholds == 1)
                                 ? 0.0
                                 : static_cast<double>(t) * static_cast<double>(k - 1) /
                                       static_cast<double>(max_thresholds - 1);
          chosen.push_back(candidates[static_cast<std::size_t>(std::llround(pos))]);
        }
        chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
      }
      for (double t : chosen) {
        SplitRule r;
        r.orig_var = var;
        r.is_threshold = true;
        r.threshold = t;
        rules.push_back(r);
      }
    }

    for (const SplitRule& r : rules) {
      BitVector bits(n);
      for (std::size_t i = 0; i < n; ++i) bits.set(i, r.applies(col[i]));
      const std::size_t ones = bits.count();
      if (ones == 0 || ones == n) continue;  // constant split, useless
      b.columns.push_back(std::move(bits));
      b.map.entries.push_back(r);
    }
  }

  if (b.columns.empty()) throw DataError("no usable splits");
  return b;
}

Dataset bootstrap_sample(const Dataset& d, Seed s) {
  d.validate();
  const std::size_t n = d.n_rows();
  SplitMix64 rng(s);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i)
    idx[i] = static_cast<std::size_t>(rng.next_below(n));

  Dataset out;
  out.feature_names = d.feature_names;
  out.feature_kinds = d.feature_kinds;
  out.columns.resize(d.n_features());
  for (std::size_t j = 0; j < d.n_features(); ++j) {
    out.columns[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) out.columns[j][i] = d.columns[j][idx[i]];
  }
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = d.labels[idx[i]];
  return out;
}

}  // namespace rid
