#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fssaudit/bias.hpp"
#include "fssaudit/features.hpp"
#include "fssaudit/scoring.hpp"
#include "fssaudit/stats.hpp"

namespace fssaudit {

using Json = nlohmann::ordered_json;

// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.10.
std::string stars(double p);

// Machine-readable twins. Every human table is rendered from these.
Json scores_metadata(const ScoreBook& scores, YearRange window);
Json bias_table_json(const BiasTable& table);
Json descriptives_json(const std::vector<ApplicantFeatures>& rows);
Json correlations_json(const std::vector<ApplicantFeatures>& rows);
Json regression_json(const RegressionResult& r);

std::string scores_csv(const ScoreBook& scores);

struct RenderOptions {
  bool one_sided = false;  // stars from one-sided p values
};

std::string render_audit(const Json& audit, const RenderOptions& options = {});
std::string render_regression(const Json& regress, const RenderOptions& options = {});

}  // namespace fssaudit
