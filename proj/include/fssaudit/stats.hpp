#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fssaudit {

struct ApplicantFeatures;

class StatsError : public std::runtime_error {
 public:
  enum class Kind { DegenerateInput, Nonconvergence, SeparationDetected, RankDeficient };
  StatsError(Kind kind, std::string message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(StatsError::Kind k);

// One-sided p is the tail in the direction of the observed statistic.
struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_one_sided = 1.0;
  double p_two_sided = 1.0;
  std::optional<double> p_bonferroni;
};

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  TestResult test;  // t = r sqrt((n-2)/(1-r^2)) on n-2 df
};

// Needs n >= 3 and nonzero variance in both vectors (DegenerateInput).
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Pooled-variance Student t, or Welch with Satterthwaite df when !pooled.
TestResult two_sample_t(std::span<const double> a, std::span<const double> b, bool pooled = true);

// p' = min(1, m p). Requires m >= p.size().
std::vector<double> bonferroni(std::span<const double> p, std::size_t m);

// Distribution tails.
double student_t_two_sided(double t, double df);
double normal_two_sided(double z);
double chi_squared_upper(double x, double df);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // sample SD, absent when n < 2
  double max = 0.0;
};

Summary summarize(std::span<const double> v);
double sample_sd(std::span<const double> v);

// Regressor order of the interacted outcome model.
inline constexpr std::array<const char*, 8> kBaseRegressors = {"FSS", "NE", "CP", "CE", "PP", "PE", "SP", "SE"};

struct DesignMatrix {
  Eigen::MatrixXd x;       // column 0 is the intercept when `intercept` is set
  Eigen::VectorXd y;
  std::vector<std::string> clusters;
  std::vector<std::string> names;
  bool intercept = true;
};

// Intercept, G, then each base regressor followed by its interaction with G
// (18 columns), clustered by competition.
DesignMatrix design_from_features(const std::vector<ApplicantFeatures>& rows);

struct LogitOptions {
  int max_iterations = 100;
  double ll_tolerance = 1e-10;
  double score_tolerance = 1e-8;
  bool cluster_small_sample = true;  // scale by G/(G-1)
};

struct Coefficient {
  std::string name;
  double b = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p = 1.0;
  double odds_ratio = 1.0;
  bool binary = false;
  std::optional<double> b_stdx;  // absent for binary columns and the intercept
};

struct RegressionResult {
  std::vector<Coefficient> coefficients;
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;  // cluster-robust
  Eigen::MatrixXd bread;       // inverse observed information
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  double pseudo_r2 = 0.0;
  double wald_chi2 = 0.0;
  int wald_df = 0;
  double wald_p = 1.0;
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;
  int iterations = 0;
  double max_abs_score = 0.0;
};

// Newton-Raphson maximum likelihood with step-halving and cluster-robust
// covariance. Throws StatsError on rank deficiency, a missing outcome class,
// separation or hitting the iteration cap.
RegressionResult fit_logit(const DesignMatrix& d, const LogitOptions& options = {});

// Sandwich covariance with the meat summed over cluster score totals.
Eigen::MatrixXd cluster_robust_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& residual,
                                          const Eigen::MatrixXd& bread, const std::vector<std::string>& clusters,
                                          bool small_sample = true);

// Heteroskedasticity-robust (HC0) sandwich covariance, meat = X' diag(r^2) X.
Eigen::MatrixXd hc0_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& residual,
                               const Eigen::MatrixXd& bread);

std::size_t count_clusters(const std::vector<std::string>& clusters);

struct VifResult {
  std::vector<std::string> names;
  std::vector<double> vif;
  double mean = 0.0;
};

// Columns exclude the intercept; each is regressed on the others plus an
// intercept. Throws RankDeficient.
VifResult vif(const Eigen::MatrixXd& columns, const std::vector<std::string>& names);

}  // namespace fssaudit
