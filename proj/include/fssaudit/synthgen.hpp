#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fssaudit/corpus.hpp"
#include "fssaudit/stats.hpp"

namespace fssaudit {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { InfeasibleConfig, InvalidConfig };
  ConfigError(Kind kind, std::string message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Latent selection score = merit * FSS percentile + cp * CP + ce * CE + pp * PP
//                        + ne * NE + sp * SP + N(0, noise_sd).
struct OutcomeWeights {
  double merit = 0.04;
  double cp = 0.25;
  double ce = 0.05;
  double pp = 0.02;
  double ne = 0.5;
  double sp = 0.3;
  double noise_sd = 1.0;

  static OutcomeWeights merit_only() { return {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}; }
};

struct GenConfig {
  std::uint64_t seed = 1;
  int n_sds = 4;
  int n_udas = 2;
  int n_universities = 12;
  int researchers_per_sds = 150;
  double female_share = 0.35;
  double full_share = 0.25;
  double associate_share = 0.20;  // the remainder are assistant professors

  double pubs_per_year = 1.2;      // mean lead-authored publications per researcher-year
  double coauthors_mean = 2.5;     // Poisson mean of coauthors besides the lead
  double colleague_share = 0.6;    // chance a coauthor slot goes to a same-unit colleague
  double citation_mean = 8.0;      // mean citations of a five-year-old publication
  double citation_shape = 1.0;     // gamma shape of the Poisson rate; lower = more skew
  int categories_per_sds = 2;
  double mobility = 0.15;          // chance a researcher changed university once

  int surname_pool = 400;
  double surname_zipf = 1.1;       // higher exponent = more shared surnames

  int competitions_per_sds = 10;
  int min_applicants = 4;
  int max_applicants = 10;
  int winners_per_competition = 1;  // 1 or 2
  double local_applicant_share = 0.4;
  double internal_president_share = 0.6;
  double external_applicant_rate = 0.15;  // expected non-roster applicants per competition
  int competition_year = 2008;

  YearRange productivity_window{2004, 2008};
  YearRange collaboration_window{2001, 2010};
  OutcomeWeights weights;

  // Throws ConfigError::InfeasibleConfig naming the violated constraint.
  void validate() const;
};

struct CompetitionTruth {
  std::string competition_id;
  std::vector<std::string> merit_winners;     // top percentiles among eligible applicants
  std::vector<std::string> selected_winners;  // top latent scores
  bool injected_bias = false;                 // selected != merit
  std::map<std::string, double> latent;
};

struct GroundTruth {
  std::vector<CompetitionTruth> competitions;
};

struct Generated {
  Corpus corpus;
  GroundTruth truth;
};

Generated generate(const GenConfig& cfg);

// ground_truth.jsonl: one record per competition.
void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& file);

// Independent-observation logit sample with the interacted 18-column layout,
// regressor marginals loosely following the descriptive statistics of the
// real applicant pool. Rows are grouped into clusters of `cluster_size`.
struct LogitSampleConfig {
  std::uint64_t seed = 1;
  std::size_t n = 5000;
  std::size_t cluster_size = 7;
  Eigen::VectorXd beta;  // 18 coefficients, intercept first
};

// Reference coefficients for the interacted model, intercept first, in design
// column order.
Eigen::VectorXd reference_coefficients();

DesignMatrix generate_logit_sample(const LogitSampleConfig& cfg);

}  // namespace fssaudit
