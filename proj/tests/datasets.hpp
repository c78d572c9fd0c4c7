#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fssaudit/bias.hpp"
#include "fssaudit/stats.hpp"
#include "oracles/mle_oracle.hpp"

namespace datasets {

// 60 observations, two correlated regressors, drawn from a fixed seed.
inline std::vector<oracle::Obs> sixty_obs() {
  std::mt19937_64 rng(60);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<oracle::Obs> d;
  for (int i = 0; i < 60; ++i) {
    const double x1 = z(rng);
    const double x2 = 0.5 * x1 + 2 * u(rng);
    const double eta = -0.5 + 1.0 * x1 - 0.8 * x2;
    d.push_back({x1, x2, u(rng) < 1 / (1 + std::exp(-eta)) ? 1.0 : 0.0});
  }
  return d;
}

inline fssaudit::DesignMatrix design(const std::vector<oracle::Obs>& d) {
  fssaudit::DesignMatrix m;
  m.x.resize(static_cast<Eigen::Index>(d.size()), 3);
  m.y.resize(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    m.x.row(static_cast<Eigen::Index>(i)) << 1.0, d[i].x1, d[i].x2;
    m.y[static_cast<Eigen::Index>(i)] = d[i].y;
    m.clusters.push_back("c" + std::to_string(i / 4));
  }
  m.names = {"Constant", "x1", "x2"};
  return m;
}

// A competition of 2 to 30 eligible applicants with one or two winners.
inline fssaudit::CompetitionView random_view(std::mt19937_64& rng, int id) {
  const int n = std::uniform_int_distribution<int>(2, 30)(rng);
  const int winners = std::uniform_int_distribution<int>(1, std::min(2, n - 1))(rng);
  std::bernoulli_distribution coarse(0.6);
  std::uniform_int_distribution<int> step(0, 40);
  std::uniform_real_distribution<double> real(0, 100);
  fssaudit::CompetitionView v;
  v.competition_id = "K" + std::to_string(id);
  v.uda_id = "U" + std::to_string(id % 3);
  for (int i = 0; i < n; ++i) {
    fssaudit::Candidate c;
    c.researcher_id = "R" + std::to_string(i);
    c.winner = i < winners;
    c.gender = i % 3 ? fssaudit::Gender::M : fssaudit::Gender::F;
    // a coarse grid makes exact threshold and median ties common
    c.percentile = coarse(rng) ? 2.5 * step(rng) : real(rng);
    c.cohort_median = 1.0;
    c.fss = coarse(rng) ? 0.5 * std::uniform_int_distribution<int>(0, 4)(rng) : real(rng) / 50;
    v.candidates.push_back(c);
  }
  std::shuffle(v.candidates.begin(), v.candidates.end(), rng);
  return v;
}

}  // namespace datasets
