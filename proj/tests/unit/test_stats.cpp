#include <doctest.h>

#include <random>

#include "fssaudit/stats.hpp"
#include "oracles/stats_oracle.hpp"

using namespace fssaudit;

namespace {

StatsError::Kind error_kind(auto&& fn) {
  try {
    fn();
  } catch (const StatsError& e) {
    return e.kind();
  }
  FAIL("expected a StatsError");
  return StatsError::Kind::DegenerateInput;
}

const std::vector<double> kX{1.2, 2.9, 3.1, 4.8, 5.0, 7.3};
const std::vector<double> kY{2.0, 2.4, 4.5, 4.1, 6.9, 7.0};

}  // namespace

TEST_CASE("pearson: fixed six-point fixture") {
  const auto r = pearson(kX, kY);
  CHECK(r.n == 6);
  CHECK(std::fabs(r.r - oracle::pearson_r(kX, kY)) <= 1e-12);
  CHECK(r.test.df == 4);
  CHECK(std::fabs(r.test.statistic - oracle::pearson_t(r.r, 6)) <= 1e-10);
  CHECK(std::fabs(r.test.p_two_sided - oracle::t_two_sided(r.test.statistic, 4)) <= 1e-10);
  CHECK(r.test.p_one_sided == r.test.p_two_sided / 2);
}

TEST_CASE("pearson: identities and degenerate input") {
  const auto same = pearson(kX, kX);
  CHECK(same.r == doctest::Approx(1.0));
  CHECK(same.test.p_two_sided == 0.0);
  std::vector<double> neg;
  for (double x : kX) neg.push_back(-3 * x + 1);
  CHECK(pearson(kX, neg).r == doctest::Approx(-1.0));
  const std::vector<double> flat(6, 2.0);
  CHECK(error_kind([&] { pearson(kX, flat); }) == StatsError::Kind::DegenerateInput);
  CHECK(error_kind([&] { pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}); }) ==
        StatsError::Kind::DegenerateInput);
}

TEST_CASE("pearson: null rejection rate") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  int rejected = 0;
  const int draws = 4000;
  for (int d = 0; d < draws; ++d) {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) x[i] = z(rng), y[i] = z(rng);
    rejected += pearson(x, y).test.p_two_sided < 0.05;
  }
  const double rate = static_cast<double>(rejected) / draws;
  CHECK(rate >= 0.035);
  CHECK(rate <= 0.065);
}

TEST_CASE("two-sample t: textbook fixture") {
  const std::vector<double> a{19.1, 21.4, 18.7, 22.3, 20.0, 19.8, 23.1};
  const std::vector<double> b{17.2, 18.9, 16.5, 19.4, 18.0};
  const auto t = two_sample_t(a, b);
  CHECK(t.df == 10);
  CHECK(std::fabs(t.statistic - oracle::pooled_t(a, b)) <= 1e-10);
  CHECK(std::fabs(t.p_two_sided - oracle::t_two_sided(t.statistic, 10)) <= 1e-10);

  // Welch: df from the Satterthwaite formula
  const auto w = two_sample_t(a, b, false);
  const double qa = oracle::variance(a) / a.size(), qb = oracle::variance(b) / b.size();
  CHECK(w.statistic == doctest::Approx((oracle::mean(a) - oracle::mean(b)) / std::sqrt(qa + qb)));
  CHECK(w.df == doctest::Approx((qa + qb) * (qa + qb) / (qa * qa / 6 + qb * qb / 4)));
  CHECK(std::fabs(w.p_two_sided - oracle::t_two_sided(w.statistic, w.df)) <= 1e-10);
}

TEST_CASE("two-sample t: symmetric and degenerate cases") {
  const std::vector<double> a{1, 4, 2, 8, 5};
  const auto same = two_sample_t(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_two_sided == doctest::Approx(1.0));

  const std::vector<double> f{1, 0, 0, 1, 0, 0}, m{0, 1, 0, 0, 1, 0, 0, 0, 1};
  CHECK(two_sample_t(f, m).statistic == doctest::Approx(0.0));

  const std::vector<double> c{3, 3, 3};
  CHECK(error_kind([&] { two_sample_t(c, c); }) == StatsError::Kind::DegenerateInput);
  CHECK(error_kind([&] { two_sample_t(std::vector<double>{1}, a); }) == StatsError::Kind::DegenerateInput);
}

TEST_CASE("bonferroni") {
  CHECK(bonferroni(std::vector<double>{0.01}, 10)[0] == doctest::Approx(0.10));
  CHECK(bonferroni(std::vector<double>{0.5}, 10)[0] == 1.0);
  const std::vector<double> p{0.001, 0.02, 0.2};
  const auto adj = bonferroni(p, 3);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::fabs(adj[i] - std::min(1.0, 3 * p[i])) <= 1e-15);
  CHECK(error_kind([&] { bonferroni(p, 2); }) == StatsError::Kind::DegenerateInput);
}

TEST_CASE("bonferroni family of ten changes which stars survive") {
  // p values of ten per-UDA correlations; stars at 0.10 / 0.05 / 0.01
  const std::vector<double> p{0.0004, 0.003, 0.008, 0.02, 0.04, 0.06, 0.09, 0.2, 0.5, 0.9};
  auto stars = [](double v) { return v < 0.01 ? 3 : v < 0.05 ? 2 : v < 0.10 ? 1 : 0; };
  const auto adj = bonferroni(p, 10);
  const std::vector<int> raw_expected{3, 3, 3, 2, 2, 1, 1, 0, 0, 0};
  const std::vector<int> adj_expected{3, 2, 1, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(stars(p[i]) == raw_expected[i]);
    CHECK(stars(adj[i]) == adj_expected[i]);
  }
}

TEST_CASE("distribution tails") {
  CHECK(normal_two_sided(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(normal_two_sided(0) == 1.0);
  CHECK(student_t_two_sided(2.228138851986274, 10) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_squared_upper(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_squared_upper(27.58711163827534, 17) == doctest::Approx(0.05).epsilon(1e-10));
  for (double t : {0.3, 1.1, 2.5, 4.0}) {
    for (double df : {3.0, 17.5, 60.0}) {
      CHECK(std::fabs(student_t_two_sided(t, df) - oracle::t_two_sided(t, df)) <= 1e-10);
    }
  }
}

TEST_CASE("summaries") {
  const auto s = summarize(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(s.n == 8);
  CHECK(s.mean == 5.0);
  CHECK(s.max == 9.0);
  CHECK(*s.sd == doctest::Approx(std::sqrt(32.0 / 7)));
  const auto one = summarize(std::vector<double>{20});
  CHECK(one.mean == 20);
  CHECK(one.max == 20);
  CHECK_FALSE(one.sd.has_value());
  CHECK(summarize(std::vector<double>{}).n == 0);
}

TEST_CASE("vif: orthogonal, fixture and near-collinear columns") {
  Eigen::MatrixXd ortho(4, 2);
  ortho << 1, 1, -1, 1, 1, -1, -1, -1;
  const auto o = vif(ortho, {"a", "b"});
  CHECK(o.vif[0] == doctest::Approx(1.0));
  CHECK(o.vif[1] == doctest::Approx(1.0));

  const std::vector<std::vector<double>> cols{
      {3.1, 4.2, 1.0, 5.5, 2.2, 6.1, 3.3, 4.4, 2.9, 5.0},
      {1.0, 2.5, 0.2, 3.9, 1.1, 4.0, 2.2, 2.8, 1.4, 3.1},
      {7.0, 3.0, 5.5, 2.1, 6.6, 1.9, 4.4, 3.8, 6.0, 2.5},
  };
  Eigen::MatrixXd m(10, 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 10; ++i) m(i, j) = cols[j][i];
  const auto v = vif(m, {"a", "b", "c"});
  const auto expect = oracle::vif(cols);
  double mean = 0;
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(v.vif[j] - expect[j]) <= 1e-10 * expect[j]);
    mean += expect[j] / 3;
  }
  CHECK(v.mean == doctest::Approx(mean));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  Eigen::MatrixXd near(50, 2);
  for (int i = 0; i < 50; ++i) {
    near(i, 0) = z(rng);
    near(i, 1) = near(i, 0) + 1e-3 * z(rng);
  }
  CHECK(vif(near, {"a", "b"}).vif[0] > 10);

  Eigen::MatrixXd dup(10, 2);
  dup.col(0) = m.col(0);
  dup.col(1) = 2 * m.col(0);
  CHECK(error_kind([&] { vif(dup, {"a", "b"}); }) == StatsError::Kind::RankDeficient);
}
