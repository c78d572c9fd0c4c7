#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "datasets.hpp"
#include "fixtures.hpp"
#include "fssaudit/bias.hpp"
#include "fssaudit/cli.hpp"
#include "fssaudit/features.hpp"
#include "fssaudit/scoring.hpp"
#include "fssaudit/stats.hpp"
#include "fssaudit/synthgen.hpp"
#include "oracles/bias_oracle.hpp"
#include "oracles/mle_oracle.hpp"
#include "oracles/stats_oracle.hpp"
#include "oracles/weights_oracle.hpp"

using namespace fssaudit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failure messages; the first few are kept for the report line.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ << (failures_ > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s): " + messages_.str()};
  }

 private:
  int failures_ = 0;
  std::ostringstream messages_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome odds_ratio_identity() {
  struct Row {
    const char* name;
    double b, odds;
  };
  const Row rows[] = {{"G", 0.404, 1.498},     {"FSS", 0.012, 1.012},   {"G*FSS", 0.004, 1.004},
                      {"NE", 0.127, 1.135},    {"G*NE", 0.983, 2.672},  {"CP", 0.188, 1.207},
                      {"G*CP", -0.028, 0.972}, {"CE", 0.067, 1.069},    {"G*CE", -0.085, 0.919},
                      {"PP", 0.024, 1.024},    {"G*PP", 0.020, 1.020},  {"PE", 0.435, 1.545},
                      {"G*PE", 0.533, 1.704},  {"SP", 0.691, 1.996},    {"G*SP", -0.646, 0.524},
                      {"SE", -0.032, 0.969},   {"G*SE", 0.011, 1.011}};
  Checker c;
  double worst = 0;
  const Eigen::VectorXd ref = reference_coefficients();
  c.require(ref.size() == 18, "reference coefficient count");
  for (std::size_t i = 0; i < std::size(rows); ++i) {
    const double gap = std::fabs(std::exp(rows[i].b) - rows[i].odds);
    worst = std::max(worst, gap);
    c.require(gap <= 0.001, std::string(rows[i].name) + " exp(b) off by " + fmt("%.5f", gap));
    if (ref.size() == 18) c.require(ref[static_cast<Eigen::Index>(i) + 1] == rows[i].b, std::string(rows[i].name) + " reference b");
  }
  return c.outcome("17 rows, max |exp(b) - OR| = " + fmt("%.5f", worst));
}

Outcome mle_correctness() {
  const auto data = datasets::sixty_obs();
  const auto fit = fit_logit(datasets::design(data));
  const auto grid = oracle::grid_mle(data);
  Checker c;
  double worst = 0;
  for (int j = 0; j < 3; ++j) {
    const double gap = std::fabs(fit.beta[j] - grid[j]);
    worst = std::max(worst, gap);
    c.require(gap <= 1e-3, "beta[" + std::to_string(j) + "] off by " + fmt("%.2e", gap));
  }
  c.require(fit.max_abs_score < 1e-8, "gradient " + fmt("%.2e", fit.max_abs_score));
  return c.outcome("max |beta - grid| = " + fmt("%.2e", worst) + ", gradient = " + fmt("%.2e", fit.max_abs_score));
}

Outcome coefficient_recovery() {
  Checker c;
  const Eigen::VectorXd truth = reference_coefficients();
  int covered = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    LogitSampleConfig cfg;
    cfg.seed = seed;
    cfg.n = 5000;
    cfg.beta = truth;
    const auto r = fit_logit(generate_logit_sample(cfg));
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
      covered += std::fabs(r.beta[j] - truth[j]) <= 3 * r.coefficients[static_cast<std::size_t>(j)].se;
      ++total;
    }
  }
  const double coverage = static_cast<double>(covered) / total;
  c.require(coverage >= 0.99, "coverage " + fmt("%.4f", coverage));

  int positive = 0;
  const int runs = 100;
  for (int seed = 1; seed <= runs; ++seed) {
    GenConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.n_sds = 4;
    cfg.competitions_per_sds = 50;
    cfg.weights.cp = 0.5;
    const Generated g = generate(cfg);
    const ScoreBook scores = score_corpus(g.corpus, cfg.productivity_window);
    const auto rows = build_feature_table(g.corpus, scores, filter_eligible(g.corpus, scores));
    const auto r = fit_logit(design_from_features(rows));
    for (const auto& coef : r.coefficients) {
      if (coef.name == "CP") positive += coef.b > 0 && coef.z > 2;
    }
  }
  c.require(positive >= 95, "b_CP > 0 with z > 2 in " + std::to_string(positive) + "/100");
  return c.outcome("coverage " + fmt("%.4f", coverage) + " over " + std::to_string(total) +
                   " coefficients; b_CP > 0, z > 2 in " + std::to_string(positive) + "/100 corpora");
}

Outcome cluster_degeneracy() {
  auto d = datasets::design(datasets::sixty_obs());
  for (std::size_t i = 0; i < d.clusters.size(); ++i) d.clusters[i] = "s" + std::to_string(i);
  const auto r = fit_logit(d);
  Eigen::VectorXd p(d.y.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = 1 / (1 + std::exp(-d.x.row(i).dot(r.beta)));
  const Eigen::MatrixXd hc0 = hc0_covariance(d.x, d.y - p, r.bread);
  const double n = static_cast<double>(d.y.size());
  Checker c;
  double worst = 0;
  for (int j = 0; j < 3; ++j) {
    const double expect = std::sqrt(hc0(j, j)) * std::sqrt(n / (n - 1));
    const double rel = std::fabs(r.coefficients[static_cast<std::size_t>(j)].se - expect) / expect;
    worst = std::max(worst, rel);
    c.require(rel <= 1e-12, "se[" + std::to_string(j) + "] relative gap " + fmt("%.2e", rel));
  }
  return c.outcome("max relative gap " + fmt("%.2e", worst));
}

Outcome detector_equivalence() {
  Checker c;
  std::mt19937_64 rng(20260101);
  std::size_t neg = 0, pos = 0;
  for (int i = 0; i < 1000; ++i) {
    const CompetitionView v = datasets::random_view(rng, i);
    std::vector<oracle::Cand> cs;
    for (const auto& x : v.candidates) cs.push_back({x.winner, x.percentile, x.fss, x.cohort_median});
    const std::string tag = "competition " + std::to_string(i);
    auto compare = [&](const std::vector<BiasFinding>& got, const std::vector<oracle::Flag>& want) {
      if (got.size() != want.size()) {
        c.require(false, tag + " flag count");
        return;
      }
      for (std::size_t k = 0; k < got.size(); ++k) {
        c.require(got[k].researcher_id == v.candidates[want[k].index].researcher_id, tag + " flagged id");
        c.require(std::fabs(got[k].level - want[k].level) <= 1e-12, tag + " level");
        c.require(triggers_to_string(got[k].triggers) == want[k].triggers, tag + " triggers");
      }
    };
    const auto n = detect_negative(v, 20.0);
    const auto p = detect_positive(v, 20.0);
    compare(n, oracle::negative(cs, 20.0));
    compare(p, oracle::positive(cs, 20.0));
    neg += n.size();
    pos += p.size();
  }
  return c.outcome("1000 competitions, " + std::to_string(neg) + " negative and " + std::to_string(pos) +
                   " positive flags identical");
}

Outcome weights_and_invariance() {
  Checker c;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  std::uniform_int_distribution<int> uni(0, 3);
  double worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = size(rng);
    std::vector<BylineEntry> byline(n);
    for (std::size_t i = 0; i < n; ++i) {
      byline[i].author = "A" + std::to_string(i);
      const int u = uni(rng);
      if (u > 0) byline[i].university = "U" + std::to_string(u);
    }
    const bool same = byline.front().university && byline.back().university &&
                      *byline.front().university == *byline.back().university;
    for (const auto conv : {BylineConvention::Alphabetical, BylineConvention::ContributionOrdered}) {
      const auto w = fractional_weights(byline, conv);
      const double gap = std::fabs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0);
      worst = std::max(worst, gap);
      c.require(gap <= 1e-12, "byline closure " + fmt("%.2e", gap));
      const auto o = oracle::byline_weights(n, conv == BylineConvention::Alphabetical, same);
      for (std::size_t i = 0; i < n; ++i) c.require(std::fabs(w[i] - o[i]) <= 1e-14, "byline slot weight");
    }
  }

  std::size_t scored = 0;
  for (std::uint64_t seed : {4u, 13u}) {
    GenConfig cfg;
    cfg.seed = seed;
    const Corpus base = generate(cfg).corpus;
    const ScoreBook ref = score_corpus(base, cfg.productivity_window);
    for (std::int64_t k : {2, 10}) {
      Corpus scaled = base;
      for (auto& p : scaled.publications) p.citations *= k;
      scaled.link();
      const ScoreBook s = score_corpus(scaled, cfg.productivity_window);
      if (s.scores().size() != ref.scores().size()) {
        c.require(false, "scored set changed under scaling");
        continue;
      }
      for (std::size_t i = 0; i < s.scores().size(); ++i) {
        const auto& a = s.scores()[i];
        const auto& b = ref.scores()[i];
        const double rel = b.fss == 0 ? std::fabs(a.fss) : std::fabs(a.fss - b.fss) / std::fabs(b.fss);
        c.require(a.researcher_id == b.researcher_id && rel <= 1e-12, "fss changed for " + b.researcher_id);
        c.require(a.percentile == b.percentile, "percentile changed for " + b.researcher_id);
      }
      scored += s.scores().size();
    }
  }
  return c.outcome("10000 bylines x 2 conventions, max closure gap " + fmt("%.1e", worst) + "; " +
                   std::to_string(scored) + " scaled scores unchanged");
}

Outcome statistical_primitives() {
  Checker c;
  auto close = [&](double got, double want, const std::string& what) {
    const double gap = std::fabs(got - want);
    c.require(gap <= 1e-10, what + " off by " + fmt("%.2e", gap));
  };
  const std::vector<double> x{1.2, 2.9, 3.1, 4.8, 5.0, 7.3}, y{2.0, 2.4, 4.5, 4.1, 6.9, 7.0};
  const auto r = pearson(x, y);
  close(r.r, oracle::pearson_r(x, y), "pearson r");
  close(r.test.statistic, oracle::pearson_t(r.r, 6), "pearson t");
  close(r.test.p_two_sided, oracle::t_two_sided(r.test.statistic, 4), "pearson p");

  const std::vector<double> a{19.1, 21.4, 18.7, 22.3, 20.0, 19.8, 23.1}, b{17.2, 18.9, 16.5, 19.4, 18.0};
  const auto t = two_sample_t(a, b);
  close(t.statistic, oracle::pooled_t(a, b), "pooled t");
  close(t.p_two_sided, oracle::t_two_sided(t.statistic, 10), "pooled p");

  const std::vector<std::vector<double>> cols{
      {3.1, 4.2, 1.0, 5.5, 2.2, 6.1, 3.3, 4.4, 2.9, 5.0},
      {1.0, 2.5, 0.2, 3.9, 1.1, 4.0, 2.2, 2.8, 1.4, 3.1},
      {7.0, 3.0, 5.5, 2.1, 6.6, 1.9, 4.4, 3.8, 6.0, 2.5},
  };
  Eigen::MatrixXd m(10, 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 10; ++i) m(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const auto v = vif(m, {"a", "b", "c"});
  const auto want = oracle::vif(cols);
  for (std::size_t j = 0; j < 3; ++j) close(v.vif[j] / want[j], 1.0, "vif relative");

  const auto data = datasets::sixty_obs();
  const auto fit = fit_logit(datasets::design(data));
  std::vector<double> ys, ps;
  for (const auto& o : data) {
    ys.push_back(o.y);
    ps.push_back(1 / (1 + std::exp(-(fit.beta[0] + fit.beta[1] * o.x1 + fit.beta[2] * o.x2))));
  }
  close(fit.pseudo_r2, oracle::mcfadden(ys, ps), "mcfadden");

  const std::vector<double> raw{0.0004, 0.003, 0.008, 0.02, 0.04, 0.06, 0.09, 0.2, 0.5, 0.9};
  const auto adj = bonferroni(raw, 10);
  for (std::size_t i = 0; i < raw.size(); ++i) close(adj[i], std::min(1.0, 10 * raw[i]), "bonferroni");

  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  int rejected = 0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    std::vector<double> u(30), w(30);
    for (int i = 0; i < 30; ++i) u[static_cast<std::size_t>(i)] = z(rng), w[static_cast<std::size_t>(i)] = z(rng);
    rejected += pearson(u, w).test.p_two_sided < 0.05;
  }
  const double rate = static_cast<double>(rejected) / draws;
  c.require(rate >= 0.035 && rate <= 0.065, "type-I rate " + fmt("%.4f", rate));
  return c.outcome("fixtures within 1e-10; type-I rate " + fmt("%.4f", rate) + " over 10000 null draws");
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fssaudit");
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

Outcome pipeline_determinism() {
  Checker c;
  const char* outputs[] = {"researchers.csv", "publications.jsonl", "competitions.jsonl", "taxonomy.csv",
                           "categories.csv",  "ground_truth.jsonl", "scores.csv",         "scores_meta.json",
                           "findings.csv",    "audit.json",         "features.csv",       "regression.json"};
  fixtures::TempDir a("accept_a"), b("accept_b");
  for (const auto* dir : {&a, &b}) {
    const std::string d = dir->path().string();
    c.require(cli({"gen", "--seed", "2718", "--out-dir", d}) == 0, "gen");
    for (const char* sub : {"score", "audit", "regress"}) {
      c.require(cli({sub, "--input-dir", d, "--out-dir", d}) == 0, std::string(sub) + " exit code");
    }
  }
  for (const char* f : outputs) {
    c.require(fs::exists(a / f) && fixtures::read_text(a / f) == fixtures::read_text(b / f),
              std::string(f) + " differs");
  }

  std::size_t competitions = 0, matched = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.weights = OutcomeWeights::merit_only();
    cfg.weights.noise_sd = 0;
    cfg.winners_per_competition = 1 + static_cast<int>(seed % 2);
    const Generated g = generate(cfg);
    for (std::size_t k = 0; k < g.corpus.competitions.size(); ++k) {
      const auto& comp = g.corpus.competitions[k];
      const auto& truth = g.truth.competitions[k];
      const std::set<std::string> winners(comp.winners.begin(), comp.winners.end());
      const std::set<std::string> merit(truth.merit_winners.begin(), truth.merit_winners.end());
      ++competitions;
      matched += truth.competition_id == comp.id && winners == merit;
    }
  }
  c.require(matched == competitions,
            "merit winners in " + std::to_string(matched) + "/" + std::to_string(competitions) + " competitions");
  return c.outcome(std::to_string(std::size(outputs)) + " files byte-identical; merit-only winners match in " +
                   std::to_string(matched) + "/" + std::to_string(competitions) + " competitions");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0 = unbounded
  };
  const Criterion criteria[] = {
      {"odds-ratio identity", odds_ratio_identity, 1},
      {"MLE vs grid oracle", mle_correctness, 10},
      {"coefficient recovery", coefficient_recovery, 300},
      {"singleton-cluster degeneracy", cluster_degeneracy, 0},
      {"bias detector vs enumerator", detector_equivalence, 0},
      {"weight closure and citation-scale invariance", weights_and_invariance, 0},
      {"statistical primitives", statistical_primitives, 0},
      {"pipeline determinism", pipeline_determinism, 0},
  };
  int failed = 0, index = 0;
  for (const auto& cr : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && cr.budget_s > 0 && secs > cr.budget_s) o = {false, "took " + fmt("%.1f", secs) + " s, budget " + fmt("%.0f", cr.budget_s) + " s"};
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << index << "] " << cr.name << ": " << o.detail << " ("
              << fmt("%.2f", secs) << " s)" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
