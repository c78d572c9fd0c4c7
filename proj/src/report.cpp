#include "fssaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "format.hpp"

namespace fssaudit {

std::string stars(double p) {
  if (std::isnan(p)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

namespace {

Json test_json(const TestResult& t) {
  Json j;
  j["statistic"] = t.statistic;
  j["df"] = t.df;
  j["p_one_sided"] = t.p_one_sided;
  j["p_two_sided"] = t.p_two_sided;
  j["p_bonferroni"] = t.p_bonferroni ? Json(*t.p_bonferroni) : Json(nullptr);
  return j;
}

Json corr_json(const std::optional<CorrelationResult>& c) {
  if (!c) return nullptr;
  Json j;
  j["r"] = c->r;
  j["n"] = c->n;
  j["test"] = test_json(c->test);
  return j;
}

Json level_json(const std::optional<LevelStats>& s) {
  if (!s) return nullptr;
  Json j;
  j["n"] = s->n;
  j["mean"] = s->mean;
  j["sd"] = s->sd ? Json(*s->sd) : Json(nullptr);
  j["max"] = s->max;
  return j;
}

Json gender_test_json(const GenderTest& g) {
  Json j;
  j["test"] = g.test ? test_json(*g.test) : Json(nullptr);
  j["note"] = g.note;
  return j;
}

Json cell_json(const BiasCell& c) {
  Json j;
  j["flagged"] = {{"F", c.flagged_f}, {"M", c.flagged_m}, {"total", c.flagged()}};
  j["applicants"] = {{"F", c.applicants_f}, {"M", c.applicants_m}, {"total", c.applicants()}};
  j["levels"] = {{"F", level_json(c.level_f)}, {"M", level_json(c.level_m)}, {"total", level_json(c.level_total)}};
  j["correlation"] = {{"F", corr_json(c.corr_f)}, {"M", corr_json(c.corr_m)}, {"total", corr_json(c.corr_total)}};
  j["incidence_test"] = gender_test_json(c.incidence);
  j["level_test"] = gender_test_json(c.levels);
  return j;
}

double number_or_nan(const Json& j) { return j.is_number() ? j.get<double>() : std::nan(""); }

}  // namespace

Json scores_metadata(const ScoreBook& scores, YearRange window) {
  Json j;
  j["window"] = window.to_string();
  j["n_scored"] = scores.scores().size();
  j["baseline_source"] = "loaded corpus";
  j["percentile_cohort"] = "researchers of the same SDS and rank present in the loaded corpus";
  std::map<std::pair<std::string, Rank>, bool> seen;
  Json cohorts = Json::array();
  for (const auto& s : scores.scores()) seen[{s.sds_id, s.rank}] = true;
  for (const auto& [key, unused] : seen) {
    cohorts.push_back({{"sds", key.first},
                       {"rank", std::string(to_string(key.second))},
                       {"n", scores.cohort_size(key.first, key.second)},
                       {"median_fss", *scores.cohort_median(key.first, key.second)}});
  }
  j["cohorts"] = std::move(cohorts);
  return j;
}

std::string scores_csv(const ScoreBook& scores) {
  std::ostringstream out;
  out << "researcher_id,sds,rank,t,n_pubs,fss,percentile\n";
  for (const auto& s : scores.scores()) {
    out << csv::join({s.researcher_id, s.sds_id, std::string(to_string(s.rank)), std::to_string(s.t),
                      std::to_string(s.n_pubs), fmt_real(s.fss), fmt_real(s.percentile)})
        << '\n';
  }
  return out.str();
}

Json bias_table_json(const BiasTable& t) {
  Json j;
  j["kind"] = std::string(to_string(t.kind));
  Json fam;
  for (const auto& [name, m] : t.bonferroni_families) fam[name] = m;
  j["bonferroni_families"] = fam.is_null() ? Json::object() : fam;
  Json rows = Json::array();
  for (const auto& uda : t.udas) {
    Json row = cell_json(t.rows.at(uda));
    row["uda"] = uda;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["total"] = cell_json(t.total);
  return j;
}

namespace {

using Getter = double (*)(const ApplicantFeatures&);

const std::vector<std::pair<std::string, Getter>>& variables() {
  static const std::vector<std::pair<std::string, Getter>> vars = {
      {"E", [](const ApplicantFeatures& f) { return double(f.E); }},
      {"FSS", [](const ApplicantFeatures& f) { return f.FSS; }},
      {"NE", [](const ApplicantFeatures& f) { return double(f.NE); }},
      {"CP", [](const ApplicantFeatures& f) { return double(f.CP); }},
      {"CE", [](const ApplicantFeatures& f) { return double(f.CE); }},
      {"PP", [](const ApplicantFeatures& f) { return f.PP; }},
      {"PE", [](const ApplicantFeatures& f) { return double(f.PE); }},
      {"SP", [](const ApplicantFeatures& f) { return double(f.SP); }},
      {"SE", [](const ApplicantFeatures& f) { return double(f.SE); }},
  };
  return vars;
}

std::vector<const ApplicantFeatures*> by_gender(const std::vector<ApplicantFeatures>& rows, int g) {
  std::vector<const ApplicantFeatures*> out;
  for (const auto& f : rows) {
    if (f.G == g) out.push_back(&f);
  }
  return out;
}

}  // namespace

Json descriptives_json(const std::vector<ApplicantFeatures>& rows) {
  Json j;
  for (int g : {1, 0}) {
    const auto group = by_gender(rows, g);
    Json gj;
    for (auto [label, select] : {std::pair{"winners", 1}, std::pair{"non_winners", 0}, std::pair{"total", -1}}) {
      Json part;
      for (std::size_t v = 1; v < variables().size(); ++v) {
        std::vector<double> values;
        for (const auto* f : group) {
          if (select < 0 || f->E == select) values.push_back(variables()[v].second(*f));
        }
        const Summary s = summarize(values);
        part[variables()[v].first] = {{"n", s.n},
                                      {"avg", s.n ? Json(s.mean) : Json(nullptr)},
                                      {"sd", s.sd ? Json(*s.sd) : Json(nullptr)},
                                      {"max", s.n ? Json(s.max) : Json(nullptr)}};
      }
      gj[label] = std::move(part);
    }
    j[g ? "F" : "M"] = std::move(gj);
  }
  return j;
}

Json correlations_json(const std::vector<ApplicantFeatures>& rows) {
  Json j;
  const auto& vars = variables();
  const std::size_t k = vars.size();
  for (int g : {1, 0}) {
    const auto group = by_gender(rows, g);
    std::vector<std::vector<double>> cols(k);
    for (std::size_t v = 0; v < k; ++v) {
      for (const auto* f : group) cols[v].push_back(vars[v].second(*f));
    }
    Json r = Json::array(), p = Json::array();
    std::vector<std::vector<std::optional<CorrelationResult>>> res(k, std::vector<std::optional<CorrelationResult>>(k));
    std::size_t family = 0;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        try {
          res[a][b] = pearson(cols[a], cols[b]);
          ++family;
        } catch (const StatsError&) {
        }
      }
    }
    Json pb = Json::array();
    for (std::size_t a = 0; a < k; ++a) {
      Json rr = Json::array(), pr = Json::array(), br = Json::array();
      for (std::size_t b = 0; b <= a; ++b) {
        if (a == b) {
          rr.push_back(1.0), pr.push_back(nullptr), br.push_back(nullptr);
        } else if (res[a][b]) {
          rr.push_back(res[a][b]->r);
          pr.push_back(res[a][b]->test.p_two_sided);
          br.push_back(std::min(1.0, static_cast<double>(family) * res[a][b]->test.p_two_sided));
        } else {
          rr.push_back(nullptr), pr.push_back(nullptr), br.push_back(nullptr);
        }
      }
      r.push_back(std::move(rr));
      p.push_back(std::move(pr));
      pb.push_back(std::move(br));
    }
    Json gj;
    Json names = Json::array();
    for (const auto& v : vars) names.push_back(v.first);
    gj["variables"] = std::move(names);
    gj["n"] = group.size();
    gj["r"] = std::move(r);
    gj["p_two_sided"] = std::move(p);
    gj["p_bonferroni"] = std::move(pb);
    gj["bonferroni_family"] = family;

    Eigen::MatrixXd x(static_cast<Eigen::Index>(group.size()), 8);
    std::vector<std::string> base;
    for (std::size_t v = 1; v < k; ++v) {
      base.push_back(vars[v].first);
      for (std::size_t i = 0; i < group.size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(v - 1)) = cols[v][i];
    }
    try {
      const VifResult vr = vif(x, base);
      Json vj;
      for (std::size_t i = 0; i < vr.names.size(); ++i) vj[vr.names[i]] = vr.vif[i];
      gj["vif"] = {{"columns", vj}, {"mean", vr.mean}};
    } catch (const StatsError& e) {
      gj["vif"] = {{"columns", nullptr}, {"mean", nullptr}, {"note", e.what()}};
    }
    j[g ? "F" : "M"] = std::move(gj);
  }
  return j;
}

Json regression_json(const RegressionResult& r) {
  Json j;
  j["n_obs"] = r.n_obs;
  j["n_clusters"] = r.n_clusters;
  j["cluster_variable"] = "competition";
  j["log_likelihood"] = r.log_likelihood;
  j["null_log_likelihood"] = r.null_log_likelihood;
  j["pseudo_r2"] = r.pseudo_r2;
  j["wald"] = {{"chi2", r.wald_chi2}, {"df", r.wald_df}, {"p", r.wald_p}};
  j["iterations"] = r.iterations;
  j["max_abs_score"] = r.max_abs_score;
  Json coefs = Json::array();
  for (const auto& c : r.coefficients) {
    coefs.push_back({{"name", c.name},
                     {"b", c.b},
                     {"odds_ratio", c.odds_ratio},
                     {"se", c.se},
                     {"z", c.z},
                     {"p", c.p},
                     {"binary", c.binary},
                     {"b_stdx", c.b_stdx ? Json(*c.b_stdx) : Json(nullptr)}});
  }
  j["coefficients"] = std::move(coefs);
  return j;
}

namespace {

std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

std::string count_share(std::size_t n, std::size_t total) {
  if (total == 0) return std::to_string(n);
  return std::to_string(n) + " (" + fmt_fixed(100.0 * static_cast<double>(n) / static_cast<double>(total), 1) + ")";
}

double pick_p(const Json& test, std::size_t family, const RenderOptions& o) {
  if (test.is_null()) return std::nan("");
  double p = number_or_nan(o.one_sided ? test["p_one_sided"] : test["p_two_sided"]);
  if (family > 0) p = std::min(1.0, static_cast<double>(family) * p);
  return p;
}

std::string corr_cell(const Json& c, std::size_t family, const RenderOptions& o) {
  if (c.is_null()) return "-";
  return fmt_fixed(c["r"].get<double>(), 3) + stars(pick_p(c["test"], family, o));
}

std::string level_cells(const Json& s) {
  if (s.is_null()) return pad_left("-", 7) + pad_left("-", 9) + pad_left("-", 7);
  return pad_left(fmt_fixed(s["mean"].get<double>(), 1), 7) + pad_left(fmt_fixed(number_or_nan(s["sd"]), 1), 9) +
         pad_left(fmt_fixed(s["max"].get<double>(), 1), 7);
}

std::string test_line(const Json& gt, std::size_t family, const RenderOptions& o) {
  const Json& t = gt["test"];
  if (t.is_null()) return "undefined (" + gt["note"].get<std::string>() + ")";
  std::string s = "t = " + fmt_fixed(t["statistic"].get<double>(), 3) + ", df = " + fmt_fixed(t["df"].get<double>(), 1) +
                  ", p(two-sided) = " + fmt_fixed(t["p_two_sided"].get<double>(), 3) +
                  ", p(one-sided) = " + fmt_fixed(t["p_one_sided"].get<double>(), 3);
  if (family > 0) s += ", p(Bonferroni, m=" + std::to_string(family) + ") = " + fmt_fixed(pick_p(t, family, o), 3);
  return s;
}

std::size_t family_of(const Json& table, const char* name) {
  const auto& f = table["bonferroni_families"];
  return f.contains(name) ? f[name].get<std::size_t>() : 0;
}

void render_counts(std::ostringstream& out, const Json& table, bool with_correlation, const RenderOptions& o) {
  const bool negative = table["kind"] == "negative";
  out << pad_right("UDA", 28) << pad_left(negative ? "Biased against" : "Favored", 32)
      << pad_left("Applicants", 36);
  if (with_correlation) out << pad_left("Correlation FSS-outcome", 36);
  out << '\n' << pad_right("", 28);
  for (int block = 0; block < 2; ++block) out << pad_left("F", 13) << pad_left("M", 13) << pad_left("Tot", 8);
  if (with_correlation) out << pad_left("F", 12) << pad_left("M", 12) << pad_left("Tot", 12);
  out << '\n';

  auto row = [&](const std::string& name, const Json& c, bool per_uda) {
    out << pad_right(name, 28);
    const auto ft = c["flagged"]["total"].get<std::size_t>();
    if (ft == 0) {
      out << pad_left("-", 13) << pad_left("-", 13) << pad_left("-", 8);
    } else {
      out << pad_left(count_share(c["flagged"]["F"], ft), 13) << pad_left(count_share(c["flagged"]["M"], ft), 13)
          << pad_left(std::to_string(ft), 8);
    }
    const auto at = c["applicants"]["total"].get<std::size_t>();
    out << pad_left(count_share(c["applicants"]["F"], at), 13) << pad_left(count_share(c["applicants"]["M"], at), 13)
        << pad_left(std::to_string(at), 8);
    if (with_correlation) {
      out << pad_left(corr_cell(c["correlation"]["F"], per_uda ? family_of(table, "corr_f") : 0, o), 12)
          << pad_left(corr_cell(c["correlation"]["M"], per_uda ? family_of(table, "corr_m") : 0, o), 12)
          << pad_left(corr_cell(c["correlation"]["total"], per_uda ? family_of(table, "corr_total") : 0, o), 12);
    }
    out << '\n';
  };
  for (const auto& r : table["rows"]) row(r["uda"].get<std::string>(), r, true);
  row("Total", table["total"], false);
}

void render_levels(std::ostringstream& out, const Json& table) {
  out << pad_right("UDA", 28);
  for (const char* g : {"F", "M", "Tot"}) out << pad_left(g, 23);
  out << '\n' << pad_right("", 28);
  for (int i = 0; i < 3; ++i) out << pad_left("Avg", 7) << pad_left("Std dev.", 9) << pad_left("Max", 7);
  out << '\n';
  auto row = [&](const std::string& name, const Json& c) {
    out << pad_right(name, 28) << level_cells(c["levels"]["F"]) << level_cells(c["levels"]["M"])
        << level_cells(c["levels"]["total"]) << '\n';
  };
  for (const auto& r : table["rows"]) row(r["uda"].get<std::string>(), r);
  row("Total", table["total"]);
}

void render_tests(std::ostringstream& out, const Json& table, const RenderOptions& o) {
  out << "Gender difference in incidence (flagged share, female vs male):\n";
  out << "  overall: " << test_line(table["total"]["incidence_test"], 0, o) << '\n';
  for (const auto& r : table["rows"]) {
    out << "  " << r["uda"].get<std::string>() << ": "
        << test_line(r["incidence_test"], family_of(table, "incidence"), o) << '\n';
  }
  out << "Gender difference in level (female vs male):\n";
  out << "  overall: " << test_line(table["total"]["level_test"], 0, o) << '\n';
  for (const auto& r : table["rows"]) {
    out << "  " << r["uda"].get<std::string>() << ": " << test_line(r["level_test"], family_of(table, "levels"), o)
        << '\n';
  }
}

const char* kLegend = "Statistical significance: *p-value <0.10, **p-value <0.05, ***p-value <0.01.";

}  // namespace

std::string render_audit(const Json& audit, const RenderOptions& o) {
  std::ostringstream out;
  out << "Bias audit (threshold " << fmt_fixed(audit["threshold"].get<double>(), 1) << " percentiles, "
      << audit["retained_competitions"].get<std::size_t>() << " competitions retained)\n\n";

  out << "Candidates biased against, applicants, and FSS-outcome correlation, by gender and UDA (% in brackets)\n";
  render_counts(out, audit["negative"], true, o);
  out << kLegend << "\nPer-UDA significance adjusted with Bonferroni corrections.\n\n";
  out << "Levels of negative bias by gender and UDA (FSS percentiles)\n";
  render_levels(out, audit["negative"]);
  out << '\n';
  render_tests(out, audit["negative"], o);

  out << "\nCandidates benefitting from positive bias and applicants, by gender and UDA (% in brackets)\n";
  render_counts(out, audit["positive"], false, o);
  out << "\nLevels of positive bias by gender and UDA (FSS percentiles";
  out << (audit["positive_levels"] == "p-i" ? ", condition P-i findings only)\n" : ", all findings)\n");
  render_levels(out, audit["positive"]);
  out << '\n';
  render_tests(out, audit["positive"], o);
  out << '\n';
  for (const auto& note : audit["notes"]) out << "Note: " << note.get<std::string>() << '\n';
  return out.str();
}

std::string render_regression(const Json& reg, const RenderOptions& o) {
  std::ostringstream out;
  const Json& desc = reg["descriptives"];
  const Json& corr = reg["correlations"];
  const Json& fit = reg["regression"];

  out << "Descriptive statistics for the regression variables, by applicant gender\n";
  for (const char* g : {"F", "M"}) {
    out << '\n' << (g[0] == 'F' ? "Female applicants" : "Male applicants") << '\n';
    out << pad_right("Var.", 6);
    for (const char* part : {"Winners", "Non winners", "Total"}) out << pad_left(part, 27);
    out << '\n' << pad_right("", 6);
    for (int i = 0; i < 3; ++i) out << pad_left("Avg", 9) << pad_left("SD", 9) << pad_left("Max", 9);
    out << '\n';
    for (const char* v : kBaseRegressors) {
      out << pad_right(v, 6);
      for (const char* part : {"winners", "non_winners", "total"}) {
        const Json& s = desc[g][part][v];
        out << pad_left(fmt_fixed(number_or_nan(s["avg"]), 2), 9) << pad_left(fmt_fixed(number_or_nan(s["sd"]), 2), 9)
            << pad_left(fmt_fixed(number_or_nan(s["max"]), 2), 9);
      }
      out << '\n';
    }
  }

  out << "\nCorrelation among variables, by applicant gender\n";
  for (const char* g : {"F", "M"}) {
    const Json& c = corr[g];
    out << '\n' << (g[0] == 'F' ? "Female applicants" : "Male applicants") << " (n = " << c["n"].get<std::size_t>()
        << ")\n"
        << pad_right("", 5);
    for (const auto& name : c["variables"]) out << pad_left(name.get<std::string>(), 11);
    out << '\n';
    const std::size_t k = c["variables"].size();
    for (std::size_t a = 0; a < k; ++a) {
      out << pad_right(c["variables"][a].get<std::string>(), 5);
      for (std::size_t b = 0; b <= a; ++b) {
        const Json& r = c["r"][a][b];
        if (a == b) {
          out << pad_left("1", 11);
        } else if (r.is_null()) {
          out << pad_left("-", 11);
        } else {
          double p = c["p_bonferroni"][a][b].get<double>();
          if (o.one_sided) p = std::min(1.0, c["p_two_sided"][a][b].get<double>() / 2.0 *
                                                 c["bonferroni_family"].get<double>());
          out << pad_left(fmt_fixed(r.get<double>(), 3) + stars(p), 11);
        }
      }
      out << '\n';
    }
    if (c["vif"]["mean"].is_null()) {
      out << "VIF undefined: " << c["vif"]["note"].get<std::string>() << '\n';
    } else {
      out << "Average VIF = " << fmt_fixed(c["vif"]["mean"].get<double>(), 2) << '\n';
    }
  }
  out << kLegend << "\nSignificance adjusted with Bonferroni corrections.\n";

  out << "\nLogistic regression results predicting competition outcomes\n";
  out << pad_right("", 10) << pad_left("b", 12) << pad_left("OR", 9) << pad_left("Std Err", 9) << pad_left("z", 8)
      << pad_left("p>|z|", 8) << pad_left("b_StdX", 12) << '\n';
  auto row = [&](const Json& c) {
    const bool intercept = c["name"] == "Constant";
    double p = c["p"].get<double>();
    if (o.one_sided) p /= 2.0;
    out << pad_right(c["name"].get<std::string>(), 10) << pad_left(fmt_fixed(c["b"].get<double>(), 3) + stars(p), 12)
        << pad_left(intercept ? "-" : fmt_fixed(c["odds_ratio"].get<double>(), 3), 9)
        << pad_left(fmt_fixed(c["se"].get<double>(), 3), 9) << pad_left(fmt_fixed(c["z"].get<double>(), 2), 8)
        << pad_left(fmt_fixed(c["p"].get<double>(), 3), 8);
    if (intercept) {
      out << '\n';
      return;
    }
    out << pad_left(c["b_stdx"].is_null() ? "[\xC2\xA7]" : fmt_fixed(c["b_stdx"].get<double>(), 3), 12) << '\n';
  };
  for (const auto& c : fit["coefficients"]) {
    if (c["name"] != "Constant") row(c);
  }
  for (const auto& c : fit["coefficients"]) {
    if (c["name"] == "Constant") row(c);
  }
  out << "[\xC2\xA7] standardized coefficient not reported for a binary explanatory variable.\n";
  out << kLegend << '\n';
  out << "Number of observations = " << fit["n_obs"].get<std::size_t>() << '\n';
  out << "Wald chi2(" << fit["wald"]["df"].get<int>() << ") = " << fmt_fixed(fit["wald"]["chi2"].get<double>(), 2)
      << "; Prob > chi2 = " << fmt_fixed(fit["wald"]["p"].get<double>(), 4) << '\n';
  out << "Log likelihood = " << fmt_fixed(fit["log_likelihood"].get<double>(), 4)
      << "; Pseudo R2 = " << fmt_fixed(fit["pseudo_r2"].get<double>(), 4) << "; Std Err. adjusted for "
      << fit["n_clusters"].get<std::size_t>() << " clusters (competitions).\n";
  return out.str();
}

}  // namespace fssaudit
