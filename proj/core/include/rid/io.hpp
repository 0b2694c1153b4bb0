#pragma once

#include <filesystem>
#include <string>

#include "rid/distribution.hpp"
#include "rid/rashomon.hpp"
#include "rid/rid.hpp"
#include "rid/stability.hpp"

namespace rid {

/// Writes content through a temporary file renamed into place, so the target
/// either holds the complete payload or is untouched.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// {"config":{...},"variables":[{"name","atoms","stats"}...],"bootstraps":[...]}
std::string rid_result_to_json(const RIDResult& r);

/// One row per variable: mean, quartiles, iqr, whiskers, P(value > 0).
std::string rid_summary_csv(const RIDResult& r);

/// Step-CDF polyline plot, fixed 640x480 viewBox, no timestamps.
std::string cdf_svg(const VIDistribution& dist, const std::string& title);

/// {"min_objective","epsilon","lambda","depth","trees":[{"objective","tree"}...]}
std::string rashomon_set_to_json(const RashomonSet& rset);

std::string stability_report_to_json(const StabilityReport& report);

}  // namespace rid
