#include "rid/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rid/errors.hpp"

namespace rid {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) {
      std::error_code ignore;
      std::filesystem::remove(tmp, ignore);
      throw DataError("failed while writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw DataError("cannot move temporary file onto '" + path.string() + "'");
  }
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["epsilon"] = cfg.epsilon;
  j["lambda"] = cfg.lambda;
  j["depth"] = cfg.depth;
  j["bootstraps"] = cfg.bootstraps;
  j["seed"] = cfg.seed;
  j["metric"] = cfg.metric;
  j["strategy"] = cfg.strategy.to_string();
  j["max_models"] = cfg.max_models;
  j["max_thresholds"] = cfg.max_thresholds;
  return j;
}

ordered_json stats_json(const VIDistribution& dist) {
  ordered_json s;
  s["mean"] = dist.mean();
  s["q25"] = dist.quantile(0.25);
  s["q50"] = dist.quantile(0.5);
  s["q75"] = dist.quantile(0.75);
  s["iqr"] = dist.iqr();
  const Interval box = dist.bwr();
  s["bwr"] = ordered_json::array({box.lo, box.hi});
  s["p_gt_zero"] = dist.p_greater(0.0);
  return s;
}

}  // namespace

std::string rid_result_to_json(const RIDResult& r) {
  ordered_json j;
  j["config"] = config_json(r.config);
  ordered_json variables = ordered_json::array();
  for (std::size_t var = 0; var < r.n_variables(); ++var) {
    const VIDistribution& dist = r.per_variable[var];
    ordered_json v;
    v["name"] = r.variable_names[var];
    ordered_json atoms = ordered_json::array();
    for (std::size_t i = 0; i < dist.size(); ++i)
      atoms.push_back(ordered_json::array({dist.values()[i], dist.weights()[i]}));
    v["atoms"] = std::move(atoms);
    v["stats"] = stats_json(dist);
    variables.push_back(std::move(v));
  }
  j["variables"] = std::move(variables);
  ordered_json boots = ordered_json::array();
  for (const BootstrapMeta& meta : r.bootstraps) {
    ordered_json b;
    b["rset_size"] = meta.rset_size;
    b["min_objective"] = meta.min_objective;
    boots.push_back(std::move(b));
  }
  j["bootstraps"] = std::move(boots);
  return j.dump(2) + "\n";
}

std::string rid_summary_csv(const RIDResult& r) {
  std::string out =
      "variable,mean,q25,q50,q75,iqr,bwr_lo,bwr_hi,p_gt_zero\n";
  for (std::size_t var = 0; var < r.n_variables(); ++var) {
    const VIDistribution& dist = r.per_variable[var];
    const Interval box = dist.bwr();
    out += r.variable_names[var];
    out += ',' + fmt(dist.mean());
    out += ',' + fmt(dist.quantile(0.25));
    out += ',' + fmt(dist.quantile(0.5));
    out += ',' + fmt(dist.quantile(0.75));
    out += ',' + fmt(dist.iqr());
    out += ',' + fmt(box.lo);
    out += ',' + fmt(box.hi);
    out += ',' + fmt(dist.p_greater(0.0));
    out += '\n';
  }
  return out;
}

std::string cdf_svg(const VIDistribution& dist, const std::string& title) {
  // Fixed geometry: plot area x in [60, 620], y in [30, 440], y axis flipped.
  const double smin = dist.support_min();
  const double smax = dist.support_max();
  const auto map_x = [&](double v) {
    return 60.0 + (v - smin) / (smax - smin) * 560.0;
  };
  const auto map_y = [&](double f) { return 440.0 - f * 410.0; };

  std::string points;
  const auto add_point = [&](double v, double f) {
    points += fmt(map_x(v)) + ',' + fmt(map_y(f)) + ' ';
  };
  add_point(smin, 0.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    add_point(dist.values()[i], cum);  // horizontal run to the atom
    cum += dist.weights()[i];
    add_point(dist.values()[i], cum);  // vertical jump
  }
  add_point(smax, 1.0);
  if (!points.empty()) points.pop_back();

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "  <text x=\"320\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + title + "</text>\n";
  svg += "  <line x1=\"60\" y1=\"440\" x2=\"620\" y2=\"440\" stroke=\"black\"/>\n";
  svg += "  <line x1=\"60\" y1=\"30\" x2=\"60\" y2=\"440\" stroke=\"black\"/>\n";
  svg += "  <text x=\"60\" y=\"460\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" + fmt(smin) + "</text>\n";
  svg += "  <text x=\"620\" y=\"460\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" + fmt(smax) + "</text>\n";
  for (double f : {0.0, 0.5, 1.0}) {
    svg += "  <text x=\"52\" y=\"" + fmt(map_y(f) + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
           fmt(f) + "</text>\n";
    svg += "  <line x1=\"56\" y1=\"" + fmt(map_y(f)) + "\" x2=\"60\" y2=\"" +
           fmt(map_y(f)) + "\" stroke=\"black\"/>\n";
  }
  svg += "  <polyline fill=\"none\" stroke=\"#4363d8\" stroke-width=\"1.5\" points=\"" +
         points + "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

namespace {

ordered_json tree_node_json(const Tree& t) {
  return ordered_json::parse(t.to_json());
}

}  // namespace

std::string rashomon_set_to_json(const RashomonSet& rset) {
  ordered_json j;
  j["min_objective"] = rset.min_objective;
  j["epsilon"] = rset.epsilon;
  j["lambda"] = rset.lambda;
  j["depth"] = rset.depth_bound;
  ordered_json trees = ordered_json::array();
  for (std::size_t i = 0; i < rset.size(); ++i) {
    ordered_json entry;
    entry["objective"] = rset.objectives[i];
    entry["tree"] = tree_node_json(rset.trees[i]);
    trees.push_back(std::move(entry));
  }
  j["trees"] = std::move(trees);
  return j.dump(2) + "\n";
}

std::string stability_report_to_json(const StabilityReport& report) {
  ordered_json j;
  j["methods"] = report.method_labels;
  j["variables"] = report.variable_names;
  ordered_json intervals;
  ordered_json matrices;
  ordered_json medians;
  ordered_json cis;
  for (std::size_t m = 0; m < report.method_labels.size(); ++m) {
    ordered_json per_dataset = ordered_json::array();
    for (const auto& dataset : report.intervals[m]) {
      ordered_json vars = ordered_json::array();
      for (const Interval& iv : dataset)
        vars.push_back(ordered_json::array({iv.lo, iv.hi}));
      per_dataset.push_back(std::move(vars));
    }
    intervals[report.method_labels[m]] = std::move(per_dataset);
    matrices[report.method_labels[m]] = report.jaccard[m];
    medians[report.method_labels[m]] = report.median_jaccard[m];
    cis[report.method_labels[m]] = ordered_json::array(
        {report.median_ci[m].lo, report.median_ci[m].hi});
  }
  j["intervals"] = std::move(intervals);
  j["jaccard"] = std::move(matrices);
  j["median_jaccard"] = std::move(medians);
  j["median_ci_95"] = std::move(cis);
  return j.dump(2) + "\n";
}

}  // namespace rid
