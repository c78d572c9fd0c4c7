#pragma once

#include <map>
#include <string>
#include <vector>

#include "fssaudit/corpus.hpp"
#include "fssaudit/parallel.hpp"
#include "fssaudit/scoring.hpp"

namespace fssaudit {

struct EligibilityRule {
  int min_career_years = 3;  // years in faculty before the competition year
};

struct EligibleSet {
  // Eligible applicant ids per competition, in applicant order. Every
  // competition appears, possibly with an empty list.
  std::map<std::string, std::vector<std::string>> applicants;
  // Competitions with at least one eligible winner and one eligible non-winner.
  std::vector<std::string> retained;
};

// An applicant is eligible when they are an incumbent assistant professor
// hired at least `min_career_years` before the competition and carry a score.
bool is_eligible(const Researcher& r, const Competition& comp, const ScoreBook& scores,
                 const EligibilityRule& rule = {});

EligibleSet filter_eligible(const Corpus& corpus, const ScoreBook& scores, const EligibilityRule& rule = {});

struct FeatureOptions {
  YearRange window{2001, 2010};
  // CP/CE overlap requires the same SDS as well as the same university.
  bool overlap_requires_sds = true;
};

struct ApplicantFeatures {
  std::string competition_id;
  std::string researcher_id;
  int E = 0;
  int G = 0;  // 1 = female
  double FSS = 0.0;  // percentile
  int NE = 0;
  int CP = 0;
  int CE = 0;
  double PP = 0.0;
  int PE = 0;
  int SP = 0;
  int SE = 0;

  friend bool operator==(const ApplicantFeatures&, const ApplicantFeatures&) = default;
};

// One row per listed applicant (each must be a scored roster researcher).
// Throws ScoringError::MissingScore for an unscored applicant.
std::vector<ApplicantFeatures> extract_features(const Competition& comp, const std::vector<std::string>& applicants,
                                                const Corpus& corpus, const ScoreBook& scores,
                                                const FeatureOptions& options = {});

// Features for every eligible applicant of every competition, ordered by
// (competition id, researcher id).
std::vector<ApplicantFeatures> build_feature_table(const Corpus& corpus, const ScoreBook& scores,
                                                   const EligibleSet& eligible, const FeatureOptions& options = {},
                                                   Execution exec = Execution::Parallel);

// Years in `window` during which both researchers hold the same affiliation.
int shared_affiliation_years(const Researcher& a, const Researcher& b, YearRange window, bool require_sds = true);

// Comma-separated export: competition_id,researcher_id,E,G,FSS,NE,CP,CE,PP,PE,SP,SE
std::string features_csv(const std::vector<ApplicantFeatures>& rows);

}  // namespace fssaudit
