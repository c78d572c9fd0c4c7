#pragma once

// Textbook recomputations: raw-sum formulas, Gauss-Jordan least squares and
// Simpson quadrature of the Student t density.

#include <cmath>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// r = (n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2))
inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += (long double)x[i] * x[i];
    syy += (long double)y[i] * y[i];
    sxy += (long double)x[i] * y[i];
  }
  return double((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

inline double t_density(double x, double df) {
  const double c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
  return std::exp(c - (df + 1) / 2 * std::log1p(x * x / df));
}

// P(|T| >= |t|) = 1 - 2 * integral of the density over [0, |t|].
inline double t_two_sided(double t, double df, int intervals = 200000) {
  const double b = std::fabs(t);
  const double h = b / intervals;
  long double s = t_density(0, df) + t_density(b, df);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0L : 2.0L) * t_density(i * h, df);
  return double(1.0L - 2.0L * s * h / 3.0L);
}

inline double pearson_t(double r, double n) { return r * std::sqrt((n - 2) / (1 - r * r)); }

inline double pooled_t(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = a.size(), nb = b.size();
  const double sp2 = ((na - 1) * variance(a) + (nb - 1) * variance(b)) / (na + nb - 2);
  return (mean(a) - mean(b)) / std::sqrt(sp2 * (1 / na + 1 / nb));
}

// Solves the normal equations (A'A) c = A'y by Gauss-Jordan elimination with
// partial pivoting. A carries the intercept as its first column.
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& A, const std::vector<double>& y) {
  const std::size_t k = A[0].size();
  std::vector<std::vector<double>> m(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r < A.size(); ++r)
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) m[i][j] += A[r][i] * A[r][j];
      m[i][k] += A[r][i] * y[r];
    }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t j = c; j <= k; ++j) m[r][j] -= f * m[c][j];
    }
  }
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = m[i][k] / m[i][i];
  return out;
}

// columns[j] is one regressor; VIF_j = SST / SSR of column j on the others.
inline std::vector<double> vif(const std::vector<std::vector<double>>& columns) {
  const std::size_t n = columns[0].size(), p = columns.size();
  std::vector<double> out;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<std::vector<double>> A(n);
    for (std::size_t r = 0; r < n; ++r) {
      A[r].push_back(1.0);
      for (std::size_t q = 0; q < p; ++q)
        if (q != j) A[r].push_back(columns[q][r]);
    }
    const auto c = least_squares(A, columns[j]);
    const double m = mean(columns[j]);
    double ssr = 0, sst = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double fit = 0;
      for (std::size_t q = 0; q < c.size(); ++q) fit += c[q] * A[r][q];
      ssr += (columns[j][r] - fit) * (columns[j][r] - fit);
      sst += (columns[j][r] - m) * (columns[j][r] - m);
    }
    out.push_back(1.0 / (1.0 - (1.0 - ssr / sst)));
  }
  return out;
}

// Bernoulli log-likelihood of probabilities p.
inline double log_likelihood(const std::vector<double>& y, const std::vector<double>& p) {
  double ll = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ll += y[i] > 0.5 ? std::log(p[i]) : std::log(1 - p[i]);
  return ll;
}

inline double mcfadden(const std::vector<double>& y, const std::vector<double>& p) {
  const double ybar = mean(y);
  const double ll0 = y.size() * (ybar * std::log(ybar) + (1 - ybar) * std::log(1 - ybar));
  return 1 - log_likelihood(y, p) / ll0;
}

}  // namespace oracle
