#include <algorithm>
#include <cmath>
#include <map>

#include "fssaudit/features.hpp"
#include "fssaudit/stats.hpp"

namespace fssaudit {
namespace {

// log(1 + exp(eta)) without overflow
double log1pexp(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double logistic(double eta) {
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - log1pexp(eta[i]);
  return ll;
}

bool is_binary(const Eigen::VectorXd& col) {
  return (col.array() == 0.0 || col.array() == 1.0).all();
}

struct NewtonState {
  Eigen::VectorXd beta;
  Eigen::VectorXd p;
  Eigen::VectorXd score;
  Eigen::MatrixXd info;
  double ll = 0.0;
};

void evaluate(const DesignMatrix& d, NewtonState& s) {
  const Eigen::VectorXd eta = d.x * s.beta;
  s.ll = log_likelihood(eta, d.y);
  s.p = eta.unaryExpr([](double e) { return logistic(e); });
  s.score = d.x.transpose() * (d.y - s.p);
  const Eigen::VectorXd w = s.p.array() * (1.0 - s.p.array());
  s.info = d.x.transpose() * w.asDiagonal() * d.x;
}

void check_separation(const NewtonState& s) {
  const double lo = 1e-10, hi = 1.0 - 1e-10;
  const bool pinned = (s.p.array() < lo).any() || (s.p.array() > hi).any();
  if (pinned && s.beta.cwiseAbs().maxCoeff() > 30.0) {
    throw StatsError(StatsError::Kind::SeparationDetected,
                     "fitted probabilities pinned at 0/1 with |beta| = " + std::to_string(s.beta.cwiseAbs().maxCoeff()));
  }
}

}  // namespace

DesignMatrix design_from_features(const std::vector<ApplicantFeatures>& rows) {
  DesignMatrix d;
  const auto n = static_cast<Eigen::Index>(rows.size());
  d.names = {"Constant", "G"};
  for (const char* base : kBaseRegressors) {
    d.names.emplace_back(base);
    d.names.push_back(std::string("G*") + base);
  }
  d.x.resize(n, static_cast<Eigen::Index>(d.names.size()));
  d.y.resize(n);
  d.clusters.reserve(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = rows[i];
    const double g = f.G;
    const double base[] = {f.FSS, double(f.NE), double(f.CP), double(f.CE), f.PP, double(f.PE), double(f.SP),
                           double(f.SE)};
    d.x(i, 0) = 1.0;
    d.x(i, 1) = g;
    for (int k = 0; k < 8; ++k) {
      d.x(i, 2 + 2 * k) = base[k];
      d.x(i, 3 + 2 * k) = g * base[k];
    }
    d.y[i] = f.E;
    d.clusters.push_back(f.competition_id);
  }
  return d;
}

Eigen::MatrixXd cluster_robust_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& residual,
                                          const Eigen::MatrixXd& bread, const std::vector<std::string>& clusters,
                                          bool small_sample) {
  std::map<std::string, Eigen::VectorXd> sums;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto [it, fresh] = sums.try_emplace(clusters[i], Eigen::VectorXd::Zero(x.cols()));
    it->second += residual[i] * x.row(i).transpose();
  }
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  for (const auto& [id, s] : sums) meat += s * s.transpose();
  const double g = static_cast<double>(sums.size());
  const double scale = small_sample && g > 1 ? g / (g - 1.0) : 1.0;
  return scale * bread * meat * bread;
}

Eigen::MatrixXd hc0_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& residual,
                               const Eigen::MatrixXd& bread) {
  const Eigen::VectorXd r2 = residual.array().square();
  const Eigen::MatrixXd meat = x.transpose() * r2.asDiagonal() * x;
  return bread * meat * bread;
}

RegressionResult fit_logit(const DesignMatrix& d, const LogitOptions& options) {
  const Eigen::Index n = d.x.rows(), k = d.x.cols();
  if (n == 0 || k == 0) throw StatsError(StatsError::Kind::DegenerateInput, "logit: empty design");
  if (static_cast<Eigen::Index>(d.clusters.size()) != n || d.y.size() != n) {
    throw StatsError(StatsError::Kind::DegenerateInput, "logit: row count mismatch");
  }
  const double positives = d.y.sum();
  if (positives <= 0.0 || positives >= static_cast<double>(n)) {
    throw StatsError(StatsError::Kind::DegenerateInput, "logit: outcome has a single class");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.x);
  if (qr.rank() < k) {
    std::string dropped;
    for (Eigen::Index j = qr.rank(); j < k; ++j) {
      if (!dropped.empty()) dropped += ", ";
      dropped += d.names.at(qr.colsPermutation().indices()[j]);
    }
    throw StatsError(StatsError::Kind::RankDeficient,
                     "design has rank " + std::to_string(qr.rank()) + " < " + std::to_string(k) +
                         " columns (collinear: " + dropped + ")");
  }

  NewtonState s;
  s.beta = Eigen::VectorXd::Zero(k);
  if (d.intercept) {
    const double ybar = positives / static_cast<double>(n);
    s.beta[0] = std::log(ybar / (1.0 - ybar));
  }
  evaluate(d, s);

  int iter = 0;
  bool converged = false;
  for (; iter < options.max_iterations; ++iter) {
    if (s.score.cwiseAbs().maxCoeff() < options.score_tolerance) {
      converged = true;
      break;
    }
    const Eigen::VectorXd step = s.info.ldlt().solve(s.score);
    NewtonState next;
    double scale = 1.0;
    for (int halving = 0; halving < 40; ++halving, scale /= 2.0) {
      next.beta = s.beta + scale * step;
      evaluate(d, next);
      if (std::isfinite(next.ll) && next.ll >= s.ll) break;
    }
    const double change = next.ll - s.ll;
    if (!(std::isfinite(next.ll) && change >= 0.0)) break;  // no ascent direction left
    s = std::move(next);
    check_separation(s);
    if (std::fabs(change) < options.ll_tolerance) {
      // The likelihood is flat to tolerance; finish with full Newton steps
      // while they keep shrinking the score.
      for (int polish = 0; polish < 5 && s.score.cwiseAbs().maxCoeff() >= options.score_tolerance; ++polish) {
        NewtonState p;
        p.beta = s.beta + s.info.ldlt().solve(s.score);
        evaluate(d, p);
        if (!(p.score.cwiseAbs().maxCoeff() < s.score.cwiseAbs().maxCoeff()) || p.ll < s.ll - 1e-9) break;
        s = std::move(p);
      }
      converged = true;
      ++iter;
      break;
    }
  }
  check_separation(s);
  if (!converged) {
    if (s.score.cwiseAbs().maxCoeff() < options.score_tolerance) {
      converged = true;
    } else {
      throw StatsError(StatsError::Kind::Nonconvergence,
                       "logit did not converge in " + std::to_string(options.max_iterations) + " iterations");
    }
  }

  RegressionResult r;
  r.beta = s.beta;
  r.iterations = iter;
  r.max_abs_score = s.score.cwiseAbs().maxCoeff();
  r.n_obs = static_cast<std::size_t>(n);
  r.n_clusters = count_clusters(d.clusters);
  r.log_likelihood = s.ll;
  const double n1 = positives, n0 = static_cast<double>(n) - positives;
  r.null_log_likelihood = n1 * std::log(n1 / static_cast<double>(n)) + n0 * std::log(n0 / static_cast<double>(n));
  r.pseudo_r2 = 1.0 - r.log_likelihood / r.null_log_likelihood;

  r.bread = s.info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd residual = d.y - s.p;
  r.covariance = cluster_robust_covariance(d.x, residual, r.bread, d.clusters, options.cluster_small_sample);

  for (Eigen::Index j = 0; j < k; ++j) {
    Coefficient c;
    c.name = d.names.size() == static_cast<std::size_t>(k) ? d.names[j] : "x" + std::to_string(j);
    c.b = s.beta[j];
    c.se = std::sqrt(r.covariance(j, j));
    c.z = c.b / c.se;
    c.p = normal_two_sided(c.z);
    c.odds_ratio = std::exp(c.b);
    const bool is_intercept = d.intercept && j == 0;
    const Eigen::VectorXd col = d.x.col(j);
    c.binary = !is_intercept && is_binary(col);
    if (!is_intercept && !c.binary) {
      std::vector<double> v(col.data(), col.data() + col.size());
      c.b_stdx = c.b * sample_sd(v);
    }
    r.coefficients.push_back(std::move(c));
  }

  const Eigen::Index first = d.intercept ? 1 : 0;
  r.wald_df = static_cast<int>(k - first);
  if (r.wald_df > 0) {
    const Eigen::VectorXd b = s.beta.tail(r.wald_df);
    const Eigen::MatrixXd v = r.covariance.bottomRightCorner(r.wald_df, r.wald_df);
    r.wald_chi2 = b.dot(v.ldlt().solve(b));
    r.wald_p = chi_squared_upper(r.wald_chi2, r.wald_df);
  }
  return r;
}

}  // namespace fssaudit
