#include "fssaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace fssaudit {

StatsError::StatsError(Kind kind, std::string message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

std::string_view to_string(StatsError::Kind k) {
  switch (k) {
    case StatsError::Kind::DegenerateInput: return "DegenerateInput";
    case StatsError::Kind::Nonconvergence: return "Nonconvergence";
    case StatsError::Kind::SeparationDetected: return "SeparationDetected";
    case StatsError::Kind::RankDeficient: return "RankDeficient";
  }
  return "StatsError";
}

double student_t_two_sided(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

double normal_two_sided(double z) {
  if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

double chi_squared_upper(double x, double df) {
  if (df <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, x)));
}

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

TestResult t_result(double t, double df) {
  TestResult r;
  r.statistic = t;
  r.df = df;
  r.p_two_sided = student_t_two_sided(t, df);
  r.p_one_sided = r.p_two_sided / 2.0;
  return r;
}

}  // namespace

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(sum_sq_dev(v, mean_of(v)) / static_cast<double>(v.size() - 1));
}

Summary summarize(std::span<const double> v) {
  Summary s;
  s.n = v.size();
  if (v.empty()) return s;
  s.mean = mean_of(v);
  s.max = *std::max_element(v.begin(), v.end());
  if (v.size() >= 2) s.sd = sample_sd(v);
  return s;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError(StatsError::Kind::DegenerateInput, "pearson: length mismatch");
  if (x.size() < 3) throw StatsError(StatsError::Kind::DegenerateInput, "pearson: need at least 3 pairs");
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double sxx = sum_sq_dev(x, mx), syy = sum_sq_dev(y, my);
  if (sxx == 0.0 || syy == 0.0) throw StatsError(StatsError::Kind::DegenerateInput, "pearson: constant vector");

  CorrelationResult out;
  out.n = x.size();
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(out.n) - 2.0;
  const double denom = 1.0 - out.r * out.r;
  const double t = denom <= 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), out.r)
                                 : out.r * std::sqrt(df / denom);
  out.test = t_result(t, df);
  return out;
}

TestResult two_sample_t(std::span<const double> a, std::span<const double> b, bool pooled) {
  if (a.size() < 2 || b.size() < 2) {
    throw StatsError(StatsError::Kind::DegenerateInput, "t-test: each sample needs at least 2 values");
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = mean_of(a), mb = mean_of(b);
  const double va = sum_sq_dev(a, ma) / (na - 1.0), vb = sum_sq_dev(b, mb) / (nb - 1.0);
  if (va == 0.0 && vb == 0.0) {
    if (ma == mb) throw StatsError(StatsError::Kind::DegenerateInput, "t-test: both samples constant and equal");
    return t_result(std::copysign(std::numeric_limits<double>::infinity(), ma - mb), na + nb - 2.0);
  }
  if (pooled) {
    const double df = na + nb - 2.0;
    const double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
    return t_result((ma - mb) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb)), df);
  }
  const double qa = va / na, qb = vb / nb;
  const double df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  return t_result((ma - mb) / std::sqrt(qa + qb), df);
}

std::vector<double> bonferroni(std::span<const double> p, std::size_t m) {
  if (m < p.size()) throw StatsError(StatsError::Kind::DegenerateInput, "bonferroni: family smaller than p list");
  std::vector<double> out;
  out.reserve(p.size());
  for (double v : p) out.push_back(std::min(1.0, static_cast<double>(m) * v));
  return out;
}

std::size_t count_clusters(const std::vector<std::string>& clusters) {
  std::vector<std::string> sorted = clusters;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

VifResult vif(const Eigen::MatrixXd& columns, const std::vector<std::string>& names) {
  const Eigen::Index n = columns.rows(), k = columns.cols();
  if (k < 2) throw StatsError(StatsError::Kind::DegenerateInput, "vif: need at least two regressors");
  Eigen::MatrixXd full(n, k + 1);
  full.col(0).setOnes();
  full.rightCols(k) = columns;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> check(full);
  if (check.rank() < k + 1) throw StatsError(StatsError::Kind::RankDeficient, "vif: regressors are collinear");

  VifResult out;
  out.names = names;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::MatrixXd others(n, k);
    others.col(0).setOnes();
    for (Eigen::Index c = 0, o = 1; c < k; ++c) {
      if (c != j) others.col(o++) = columns.col(c);
    }
    const Eigen::VectorXd target = columns.col(j);
    const Eigen::VectorXd coef = others.colPivHouseholderQr().solve(target);
    const double ssr = (target - others * coef).squaredNorm();
    const double sst = (target.array() - target.mean()).matrix().squaredNorm();
    if (sst == 0.0) throw StatsError(StatsError::Kind::RankDeficient, "vif: constant column " + names.at(j));
    out.vif.push_back(sst / ssr);  // 1 / (1 - R^2)
  }
  out.mean = std::accumulate(out.vif.begin(), out.vif.end(), 0.0) / static_cast<double>(k);
  return out;
}

}  // namespace fssaudit
